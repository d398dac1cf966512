#pragma once

#include <cstdint>
#include <vector>

#include "refed/layers.hpp"
#include "refed/params.hpp"
#include "refed/rng.hpp"

namespace refed {

enum class RecommenderBackend { kGru, kAttention };

struct RecommenderConfig {
    RecommenderBackend backend = RecommenderBackend::kGru;
    std::size_t latent_dim = 16;
    std::size_t n_items = 0;   // catalog size m
    std::size_t heads = 4;     // attention backend only
};

/// One training pair: the discrete embeddings of a window's items plus the
/// next item to predict.
struct RecPair {
    Tensor embeddings;          // (w, latent)
    std::int64_t target = 0;
};

/// Next-item predictor over discrete window embeddings. The item matrix V uses
/// the latest quantized code for items that have been seen and a learned free
/// row for items that have not.
class Recommender {
public:
    Recommender(const RecommenderConfig& cfg, Rng init_rng);

    /// GRU backend: final hidden state; attention backend: last-position
    /// output of one self-attention block.
    Tensor sequence_repr(const Tensor& embeddings);

    /// y = softmax(V h) over the catalog; sums to 1.
    std::vector<double> score(const Tensor& h) const;

    /// Installs the latest quantized code for an item (marks it seen; the row
    /// is no longer trained).
    void set_item_code(std::int64_t item, const std::vector<double>& code);
    bool item_seen(std::int64_t item) const { return seen_[static_cast<std::size_t>(item)]; }
    const Tensor& item_matrix() const { return V_; }

    /// Cross-entropy loss for one pair; accumulates gradients.
    double train_example(const RecPair& pair);
    /// Plain per-example SGD with per-epoch shuffling; returns the loss trace.
    std::vector<double> train(const std::vector<RecPair>& pairs, std::size_t epochs,
                              double lr, Rng& rng);

    /// k items by descending score, ties broken by ascending item id.
    static std::vector<std::int64_t> top_k(const std::vector<double>& scores, std::size_t k);

    ParameterSet checkpoint() const;
    void restore(const ParameterSet& ps);

    const RecommenderConfig& config() const { return cfg_; }

private:
    void zero_grads();
    void apply_step(double lr);

    RecommenderConfig cfg_;
    GruCell gru_;
    MultiHeadAttention attn_;
    Tensor V_;                  // (m, latent)
    Tensor dV_;
    std::vector<bool> seen_;
};

}  // namespace refed
