#include "refed/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace refed {

Recommender::Recommender(const RecommenderConfig& cfg, Rng init_rng)
    : cfg_(cfg),
      gru_(cfg.latent_dim, cfg.latent_dim),
      attn_(cfg.latent_dim, cfg.heads),
      V_({cfg.n_items, cfg.latent_dim}),
      dV_({cfg.n_items, cfg.latent_dim}),
      seen_(cfg.n_items, false) {
    if (cfg.n_items == 0) throw std::invalid_argument("Recommender: catalog size must be > 0");
    gru_.init(init_rng);
    attn_.init(init_rng);
    init_uniform(V_, cfg.latent_dim, init_rng);
}

Tensor Recommender::sequence_repr(const Tensor& embeddings) {
    if (embeddings.rows() == 0)
        throw std::invalid_argument("Recommender::sequence_repr: empty embedding sequence");
    if (embeddings.cols() != cfg_.latent_dim)
        throw std::invalid_argument("Recommender::sequence_repr: expected dim " +
                                    std::to_string(cfg_.latent_dim) + ", got " + embeddings.shape_str());
    if (cfg_.backend == RecommenderBackend::kGru) {
        return gru_.run_sequence(embeddings);
    }
    Tensor out = attn_.forward(embeddings, embeddings);
    std::size_t last = out.rows() - 1;
    Tensor h({cfg_.latent_dim});
    for (std::size_t k = 0; k < cfg_.latent_dim; ++k) h.at(k) = out.at(last, k);
    return h;
}

std::vector<double> Recommender::score(const Tensor& h) const {
    if (h.size() != cfg_.latent_dim)
        throw std::invalid_argument("Recommender::score: h shape " + h.shape_str() + " vs dim " +
                                    std::to_string(cfg_.latent_dim));
    std::vector<double> logits(cfg_.n_items, 0.0);
    for (std::size_t i = 0; i < cfg_.n_items; ++i)
        for (std::size_t k = 0; k < cfg_.latent_dim; ++k) logits[i] += V_.at(i, k) * h.at(k);
    return softmax_vec(logits);
}

void Recommender::set_item_code(std::int64_t item, const std::vector<double>& code) {
    if (item < 0 || static_cast<std::size_t>(item) >= cfg_.n_items)
        throw std::invalid_argument("Recommender::set_item_code: item out of range");
    if (code.size() != cfg_.latent_dim)
        throw std::invalid_argument("Recommender::set_item_code: code length mismatch");
    for (std::size_t k = 0; k < cfg_.latent_dim; ++k)
        V_.at(static_cast<std::size_t>(item), k) = code[k];
    seen_[static_cast<std::size_t>(item)] = true;
}

double Recommender::train_example(const RecPair& pair) {
    if (pair.target < 0 || static_cast<std::size_t>(pair.target) >= cfg_.n_items)
        throw std::invalid_argument("Recommender: target item " + std::to_string(pair.target) +
                                    " outside catalog of " + std::to_string(cfg_.n_items));
    Tensor h = sequence_repr(pair.embeddings);
    std::vector<double> y = score(h);
    std::size_t tgt = static_cast<std::size_t>(pair.target);
    double loss = -std::log(std::max(y[tgt], 1e-300));

    // softmax cross-entropy: dlogits = y - onehot(target)
    Tensor dh({cfg_.latent_dim});
    for (std::size_t i = 0; i < cfg_.n_items; ++i) {
        double d = y[i] - (i == tgt ? 1.0 : 0.0);
        for (std::size_t k = 0; k < cfg_.latent_dim; ++k) {
            dh.at(k) += d * V_.at(i, k);
            dV_.at(i, k) += d * h.at(k);
        }
    }

    if (cfg_.backend == RecommenderBackend::kGru) {
        gru_.backward_sequence(dh);
    } else {
        Tensor d_out({pair.embeddings.rows(), cfg_.latent_dim});
        std::size_t last = d_out.rows() - 1;
        for (std::size_t k = 0; k < cfg_.latent_dim; ++k) d_out.at(last, k) = dh.at(k);
        attn_.backward(d_out);
    }
    return loss;
}

void Recommender::zero_grads() {
    gru_.zero_grads();
    attn_.zero_grads();
    dV_.fill(0.0);
}

void Recommender::apply_step(double lr) {
    if (cfg_.backend == RecommenderBackend::kGru)
        gru_.apply_sgd(lr);
    else
        attn_.apply_sgd(lr);
    // only free rows train; seen rows carry quantized codes
    for (std::size_t i = 0; i < cfg_.n_items; ++i) {
        if (seen_[i]) continue;
        for (std::size_t k = 0; k < cfg_.latent_dim; ++k) V_.at(i, k) -= lr * dV_.at(i, k);
    }
}

std::vector<double> Recommender::train(const std::vector<RecPair>& pairs, std::size_t epochs,
                                       double lr, Rng& rng) {
    if (pairs.empty()) throw std::invalid_argument("Recommender::train: no training pairs");
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> trace;
    for (std::size_t e = 0; e < epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng.engine());
        double total = 0.0;
        for (std::size_t idx : order) {
            zero_grads();
            total += train_example(pairs[idx]);
            apply_step(lr);
        }
        trace.push_back(total / static_cast<double>(pairs.size()));
    }
    return trace;
}

std::vector<std::int64_t> Recommender::top_k(const std::vector<double>& scores, std::size_t k) {
    if (k < 1 || k > scores.size())
        throw std::invalid_argument("top_k: k=" + std::to_string(k) + " outside [1," +
                                    std::to_string(scores.size()) + "]");
    std::vector<std::int64_t> ids(scores.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::stable_sort(ids.begin(), ids.end(), [&](std::int64_t a, std::int64_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    ids.resize(k);
    return ids;
}

ParameterSet Recommender::checkpoint() const {
    ParameterSet ps;
    gru_.export_params(ps, "rec.gru");
    attn_.export_params(ps, "rec.attn");
    ps.set("rec.V", V_);
    return ps;
}

void Recommender::restore(const ParameterSet& ps) {
    gru_.import_params(ps, "rec.gru");
    attn_.import_params(ps, "rec.attn");
    V_ = ps.get("rec.V");
}

}  // namespace refed
