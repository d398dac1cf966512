#pragma once

#include <optional>
#include <string>
#include <vector>

#include "refed/params.hpp"
#include "refed/rng.hpp"
#include "refed/tensor.hpp"

namespace refed {

/// Fully connected layer: y = x W^T + b over rows of x.
class Dense {
public:
    Dense(std::size_t in_dim, std::size_t out_dim);
    void init(Rng& rng);

    Tensor forward(const Tensor& x);
    /// Accumulates into dW/db, returns input gradient. Throws if no forward
    /// pass has been recorded.
    Tensor backward(const Tensor& upstream);

    void export_params(ParameterSet& ps, const std::string& prefix) const;
    void import_params(const ParameterSet& ps, const std::string& prefix);
    void export_grads(ParameterSet& ps, const std::string& prefix) const;
    void zero_grads();
    void apply_sgd(double lr);

    std::size_t in_dim() const { return in_dim_; }
    std::size_t out_dim() const { return out_dim_; }

    Tensor W, b, dW, db;

private:
    std::size_t in_dim_, out_dim_;
    std::optional<Tensor> last_input_;
};

/// Causal 1-D convolution over a (len, in_ch) sequence; output (len, out_ch).
/// Positions before the start are treated as zero.
class Conv1D {
public:
    Conv1D(std::size_t in_ch, std::size_t out_ch, std::size_t kernel);
    void init(Rng& rng);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& upstream);

    void export_params(ParameterSet& ps, const std::string& prefix) const;
    void import_params(const ParameterSet& ps, const std::string& prefix);
    void export_grads(ParameterSet& ps, const std::string& prefix) const;
    void zero_grads();
    void apply_sgd(double lr);

    Tensor W;  // (out_ch, in_ch, kernel)
    Tensor b;  // (out_ch)
    Tensor dW, db;

    std::size_t in_ch() const { return in_ch_; }
    std::size_t out_ch() const { return out_ch_; }
    std::size_t kernel() const { return kernel_; }

private:
    std::size_t in_ch_, out_ch_, kernel_;
    std::optional<Tensor> last_input_;
};

/// Strided 1-D convolution used by the server-side sampler to downsample long
/// parameter vectors. Valid positions only: out_len = (len - kernel)/stride + 1.
class StridedConv1D {
public:
    StridedConv1D(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, std::size_t stride);
    void init(Rng& rng);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& upstream);

    void export_params(ParameterSet& ps, const std::string& prefix) const;
    void import_params(const ParameterSet& ps, const std::string& prefix);
    void export_grads(ParameterSet& ps, const std::string& prefix) const;
    void zero_grads();
    void apply_sgd(double lr);

    std::size_t out_len(std::size_t in_len) const;

    Tensor W, b, dW, db;

private:
    std::size_t in_ch_, out_ch_, kernel_, stride_;
    std::optional<Tensor> last_input_;
};

/// Elementwise tanh.
class Tanh {
public:
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& upstream);

private:
    std::optional<Tensor> last_output_;
};

/// Standard update/reset/candidate GRU cell, unrolled over a sequence.
class GruCell {
public:
    GruCell(std::size_t in_dim, std::size_t hid_dim);
    void init(Rng& rng);

    /// Runs the cell over xs (T, in_dim) from h0 = 0; returns the final hidden
    /// state as a (hid_dim) tensor and caches all intermediates for BPTT.
    Tensor run_sequence(const Tensor& xs);
    /// Backpropagates a gradient w.r.t. the final hidden state; accumulates
    /// parameter gradients and returns the gradient w.r.t. xs.
    Tensor backward_sequence(const Tensor& d_final_h);

    void export_params(ParameterSet& ps, const std::string& prefix) const;
    void import_params(const ParameterSet& ps, const std::string& prefix);
    void export_grads(ParameterSet& ps, const std::string& prefix) const;
    void zero_grads();
    void apply_sgd(double lr);

    std::size_t hid_dim() const { return hid_; }

    Tensor Wz, Uz, bz, Wr, Ur, br, Wh, Uh, bh;
    Tensor dWz, dUz, dbz, dWr, dUr, dbr, dWh, dUh, dbh;

private:
    struct StepCache {
        std::vector<double> x, h_prev, z, r, n, uh_h;
    };
    std::size_t in_, hid_;
    std::vector<StepCache> steps_;
};

/// Scaled-dot-product multi-head attention: MultiHead(q, kv, kv).
class MultiHeadAttention {
public:
    MultiHeadAttention(std::size_t model_dim, std::size_t heads);
    void init(Rng& rng);

    Tensor forward(const Tensor& q_in, const Tensor& kv_in);
    /// Returns (dq_in, dkv_in).
    std::pair<Tensor, Tensor> backward(const Tensor& upstream);

    /// Per-head softmax weight matrices from the last forward pass.
    const std::vector<Tensor>& last_weights() const { return attn_; }

    void export_params(ParameterSet& ps, const std::string& prefix) const;
    void import_params(const ParameterSet& ps, const std::string& prefix);
    void export_grads(ParameterSet& ps, const std::string& prefix) const;
    void zero_grads();
    void apply_sgd(double lr);

    Tensor Wq, Wk, Wv, Wo;
    Tensor dWq, dWk, dWv, dWo;

private:
    std::size_t dm_, heads_, dh_;
    std::optional<Tensor> q_in_, kv_in_, Q_, K_, V_, concat_;
    std::vector<Tensor> attn_;  // per-head (n, m) softmax weights
};

/// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
void init_uniform(Tensor& t, std::size_t fan_in, Rng& rng);

}  // namespace refed
