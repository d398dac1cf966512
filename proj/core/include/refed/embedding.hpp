#pragma once

#include <optional>
#include <vector>

#include "refed/layers.hpp"
#include "refed/params.hpp"
#include "refed/privacy.hpp"
#include "refed/rng.hpp"
#include "refed/sampler.hpp"

namespace refed {

struct EmbeddingConfig {
    std::size_t w = 16;          // window length
    std::size_t feat_dim = 16;   // item feature dimension d
    std::size_t latent_dim = 16; // discrete embedding dimension
    std::size_t conv1_filters = 32;
    std::size_t conv2_filters = 16;
    std::size_t kernel = 2;
    std::size_t codebook_size = 64;
    std::size_t heads = 4;
    double beta_vq = 0.25;       // commitment weight
    bool use_attention = true;   // ablation switch
};

struct QuantizeResult {
    Tensor z;                        // (w, latent) selected code vectors
    std::vector<std::size_t> indices;
};

/// Self-supervised temporal embedding model: encoder -> vector quantization ->
/// multi-head attention between encoder latents and codes -> decoder. Only the
/// encoder parameters are ever shared; codebook, attention and decoder stay on
/// the device.
class EmbeddingModel {
public:
    EmbeddingModel(const EmbeddingConfig& cfg, Rng init_rng);

    Tensor encode(const Tensor& x);
    QuantizeResult quantize(const Tensor& z_e) const;
    Tensor attend(const Tensor& z, const Tensor& z_e);
    Tensor decode(const Tensor& z_a);

    /// Flipped-ELBO value: mean-square reconstruction + codebook term
    /// (stop-gradient on the encoder output) + beta-weighted commitment.
    static double loss_emb(const Tensor& x, const Tensor& x_hat, const Tensor& z_e,
                           const Tensor& e_sel, double beta_vq);

    /// One full forward/backward for a single window; accumulates gradients
    /// into the layers and returns the loss.
    double train_example(const WindowSample& sample);

    /// Trains on batches of windows. With a DP config, per-example gradients
    /// are clipped and noised before each update (one update per batch).
    std::vector<double> train(const std::vector<std::vector<WindowSample>>& batches,
                              std::size_t epochs, double lr,
                              const DpConfig* dp = nullptr, Rng* dp_rng = nullptr);

    /// Quantized latents for a window; rows are the discrete embeddings of the
    /// window items at their temporal positions.
    QuantizeResult embed_window(const WindowSample& sample);
    /// The discrete embedding at the position nearest the target.
    std::vector<double> embed_item(const WindowSample& sample);

    /// Exactly the encoder subset, in fixed flattening order.
    ParameterSet shared_payload() const;
    void install_shared(const ParameterSet& encoder_params);

    ParameterSet checkpoint() const;
    void restore(const ParameterSet& ps);

    ParameterSet gradients() const;
    void zero_grads();
    void apply_grads(const ParameterSet& grads, double lr);

    const EmbeddingConfig& config() const { return cfg_; }
    bool codebook_ready() const { return codebook_ready_; }
    const Tensor& codebook() const { return codebook_; }
    Tensor& mutable_codebook() { return codebook_; }
    void seed_codebook(const std::vector<WindowSample>& batch);

    MultiHeadAttention& attention() { return attn_; }

private:
    Tensor encoder_backward(const Tensor& d_z_e);

    EmbeddingConfig cfg_;
    Rng rng_;

    Conv1D enc_conv1_;
    Tanh enc_act1_;
    Conv1D enc_conv2_;
    Tanh enc_act2_;
    Dense enc_proj_;

    Tensor codebook_;   // (J, latent)
    Tensor d_codebook_;
    bool codebook_ready_ = false;

    MultiHeadAttention attn_;

    Dense dec_proj_;
    Tanh dec_act1_;
    Conv1D dec_conv1_;
    Tanh dec_act2_;
    Conv1D dec_conv2_;
};

/// Brute-force nearest-neighbor index, used by quantize and as a test oracle
/// entry point: returns argmin_j ||v - codebook_row_j||_2, lowest index wins ties.
std::size_t nearest_code(const Tensor& codebook, const double* v, std::size_t dim);

}  // namespace refed
