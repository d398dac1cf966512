#pragma once

#include <vector>

#include "refed/layers.hpp"
#include "refed/params.hpp"
#include "refed/rng.hpp"

namespace refed {

struct SemanticConfig {
    std::size_t input_dim = 0;   // |m_u|, identical for all clients
    std::size_t latent_dim = 16;
    std::size_t conv1_filters = 64;
    std::size_t conv2_filters = 32;
    std::size_t kernel = 4;
    std::size_t stride = 4;
    std::size_t dense_units = 16;
};

/// Server-side VAE that embeds flattened client encoder parameters into a
/// low-dimensional space for clustering. Training samples the posterior via
/// the reparameterization trick; inference returns the posterior mean, so
/// embeddings are deterministic.
class SemanticSampler {
public:
    SemanticSampler(const SemanticConfig& cfg, Rng init_rng);

    /// Trains on equal-length parameter vectors; loss = closed-form KL against
    /// the standard Gaussian prior + squared reconstruction error. Returns the
    /// per-epoch loss trace.
    std::vector<double> train(const std::vector<std::vector<double>>& vectors,
                              std::size_t epochs, double lr, Rng& train_rng);

    /// Posterior mean of a parameter vector; never mutates sampler state.
    std::vector<double> embed(const std::vector<double>& m_u) const;

    bool trained() const { return trained_; }
    const SemanticConfig& config() const { return cfg_; }

    /// Analytic KL(N(mu, diag(exp(logvar))) || N(0, I)).
    static double gaussian_kl(const std::vector<double>& mu, const std::vector<double>& logvar);

    ParameterSet checkpoint() const;
    void restore(const ParameterSet& ps);

private:
    std::vector<double> standardize(const std::vector<double>& v) const;
    double train_example(const std::vector<double>& x_std, double lr, Rng& rng);
    void adam_step(double lr);

    SemanticConfig cfg_;
    std::size_t conv1_out_len_ = 0, conv2_out_len_ = 0, flat_dim_ = 0;

    StridedConv1D conv1_;
    StridedConv1D conv2_;
    Dense dense1_;
    Dense dense2_;
    Dense head_mu_;
    Dense head_logvar_;
    Dense dec1_;
    Dense dec2_;
    Dense dec_out_;
    Tanh act_c1_, act_c2_, act_d1_, act_d2_, act_e1_, act_e2_;

    // input standardization learned from the first training pool
    std::vector<double> input_mean_;
    double input_scale_ = 1.0;
    bool trained_ = false;

    // Adam state over the flattened parameters; persists across refreshes
    std::vector<double> adam_m_, adam_v_;
    std::size_t adam_t_ = 0;
};

}  // namespace refed
