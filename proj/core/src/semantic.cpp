#include "refed/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace refed {

namespace {

// const forward helpers for the inference path (no caching, no mutation)

Tensor dense_apply(const Dense& d, const Tensor& x) {
    Tensor y = matmul_tB(x, d.W);
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t j = 0; j < y.cols(); ++j) y.at(i, j) += d.b.at(j);
    return y;
}

Tensor strided_conv_apply(const StridedConv1D& c, const Tensor& x, std::size_t kernel,
                          std::size_t stride, std::size_t out_ch, std::size_t in_ch) {
    std::size_t ol = (x.rows() - kernel) / stride + 1;
    Tensor y({ol, out_ch});
    for (std::size_t t = 0; t < ol; ++t)
        for (std::size_t oc = 0; oc < out_ch; ++oc) {
            double s = c.b.at(oc);
            for (std::size_t j = 0; j < kernel; ++j)
                for (std::size_t ic = 0; ic < in_ch; ++ic)
                    s += c.W.at3(oc, ic, j) * x.at(t * stride + j, ic);
            y.at(t, oc) = s;
        }
    return y;
}

void tanh_inplace(Tensor& t) {
    for (auto& v : t.values) v = std::tanh(v);
}

}  // namespace

SemanticSampler::SemanticSampler(const SemanticConfig& cfg, Rng init_rng)
    : cfg_(cfg),
      conv1_(1, cfg.conv1_filters, cfg.kernel, cfg.stride),
      conv2_(cfg.conv1_filters, cfg.conv2_filters, cfg.kernel, cfg.stride),
      dense1_(1, 1),  // re-sized below once lengths are known
      dense2_(cfg.dense_units, cfg.dense_units),
      head_mu_(cfg.dense_units, cfg.latent_dim),
      head_logvar_(cfg.dense_units, cfg.latent_dim),
      dec1_(cfg.latent_dim, cfg.dense_units),
      dec2_(cfg.dense_units, cfg.dense_units),
      dec_out_(cfg.dense_units, cfg.input_dim) {
    if (cfg.input_dim < cfg.kernel * cfg.stride)
        throw std::invalid_argument("SemanticSampler: input dim too small for the conv front-end");
    conv1_out_len_ = (cfg.input_dim - cfg.kernel) / cfg.stride + 1;
    conv2_out_len_ = (conv1_out_len_ - cfg.kernel) / cfg.stride + 1;
    if (conv2_out_len_ == 0)
        throw std::invalid_argument("SemanticSampler: input dim too small for two strided convs");
    flat_dim_ = conv2_out_len_ * cfg.conv2_filters;
    dense1_ = Dense(flat_dim_, cfg.dense_units);

    conv1_.init(init_rng);
    conv2_.init(init_rng);
    dense1_.init(init_rng);
    dense2_.init(init_rng);
    head_mu_.init(init_rng);
    head_logvar_.init(init_rng);
    dec1_.init(init_rng);
    dec2_.init(init_rng);
    dec_out_.init(init_rng);
    // start with a small posterior stddev (~e^-2) so the reconstruction can
    // see the mean signal through the reparameterization noise from epoch 0
    for (auto& v : head_logvar_.b.values) v = -4.0;
    input_mean_.assign(cfg.input_dim, 0.0);
}

double SemanticSampler::gaussian_kl(const std::vector<double>& mu, const std::vector<double>& logvar) {
    double kl = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        kl += 0.5 * (mu[i] * mu[i] + std::exp(logvar[i]) - 1.0 - logvar[i]);
    return kl;
}

std::vector<double> SemanticSampler::standardize(const std::vector<double>& v) const {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - input_mean_[i]) / input_scale_;
    return out;
}

double SemanticSampler::train_example(const std::vector<double>& x_std, double lr, Rng& rng) {
    Tensor x = Tensor::matrix(cfg_.input_dim, 1, x_std);
    Tensor c1 = act_c1_.forward(conv1_.forward(x));
    Tensor c2 = act_c2_.forward(conv2_.forward(c1));
    Tensor flat = Tensor::matrix(1, flat_dim_, c2.values);
    Tensor d1 = act_d1_.forward(dense1_.forward(flat));
    Tensor d2 = act_d2_.forward(dense2_.forward(d1));
    Tensor mu = head_mu_.forward(d2);
    Tensor logvar = head_logvar_.forward(d2);
    for (auto& v : logvar.values) v = std::clamp(v, -8.0, 8.0);

    std::vector<double> eps(cfg_.latent_dim);
    Tensor zvec({1, cfg_.latent_dim});
    for (std::size_t i = 0; i < cfg_.latent_dim; ++i) {
        eps[i] = rng.gaussian(0.0, 1.0);
        zvec.at(0, i) = mu.at(0, i) + std::exp(0.5 * logvar.at(0, i)) * eps[i];
    }

    Tensor e1 = act_e1_.forward(dec1_.forward(zvec));
    Tensor e2 = act_e2_.forward(dec2_.forward(e1));
    Tensor x_hat = dec_out_.forward(e2);

    double recon = 0.0;
    Tensor d_xhat({1, cfg_.input_dim});
    for (std::size_t i = 0; i < cfg_.input_dim; ++i) {
        double diff = x_hat.at(0, i) - x_std[i];
        recon += diff * diff;
        d_xhat.at(0, i) = 2.0 * diff;
    }
    double kl = gaussian_kl(mu.values, logvar.values);
    double loss = recon + kl;

    // backward
    conv1_.zero_grads(); conv2_.zero_grads();
    dense1_.zero_grads(); dense2_.zero_grads();
    head_mu_.zero_grads(); head_logvar_.zero_grads();
    dec1_.zero_grads(); dec2_.zero_grads(); dec_out_.zero_grads();

    Tensor dz = dec1_.backward(act_e1_.backward(dec2_.backward(act_e2_.backward(dec_out_.backward(d_xhat)))));
    Tensor dmu({1, cfg_.latent_dim}), dlogvar({1, cfg_.latent_dim});
    for (std::size_t i = 0; i < cfg_.latent_dim; ++i) {
        dmu.at(0, i) = dz.at(0, i) + mu.at(0, i);
        dlogvar.at(0, i) = dz.at(0, i) * eps[i] * 0.5 * std::exp(0.5 * logvar.at(0, i)) +
                           0.5 * (std::exp(logvar.at(0, i)) - 1.0);
    }
    Tensor dd2 = head_mu_.backward(dmu);
    dd2 += head_logvar_.backward(dlogvar);
    Tensor dd1 = dense1_.backward(act_d1_.backward(dense2_.backward(act_d2_.backward(dd2))));
    Tensor dflat = Tensor::matrix(conv2_out_len_, cfg_.conv2_filters, dd1.values);
    conv1_.backward(act_c1_.backward(conv2_.backward(act_c2_.backward(dflat))));

    adam_step(lr);
    return loss;
}

void SemanticSampler::adam_step(double lr) {
    ParameterSet params, grads;
    auto collect = [&](auto& layer, const char* prefix) {
        layer.export_params(params, prefix);
        layer.export_grads(grads, prefix);
    };
    collect(conv1_, "sem.conv1");
    collect(conv2_, "sem.conv2");
    collect(dense1_, "sem.dense1");
    collect(dense2_, "sem.dense2");
    collect(head_mu_, "sem.mu");
    collect(head_logvar_, "sem.logvar");
    collect(dec1_, "sem.dec1");
    collect(dec2_, "sem.dec2");
    collect(dec_out_, "sem.out");
    std::vector<double> p = params.flatten();
    std::vector<double> g = grads.flatten();
    if (adam_m_.size() != p.size()) {
        adam_m_.assign(p.size(), 0.0);
        adam_v_.assign(p.size(), 0.0);
        adam_t_ = 0;
    }
    ++adam_t_;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    double c1 = 1.0 - std::pow(b1, static_cast<double>(adam_t_));
    double c2 = 1.0 - std::pow(b2, static_cast<double>(adam_t_));
    for (std::size_t i = 0; i < p.size(); ++i) {
        adam_m_[i] = b1 * adam_m_[i] + (1.0 - b1) * g[i];
        adam_v_[i] = b2 * adam_v_[i] + (1.0 - b2) * g[i] * g[i];
        p[i] -= lr * (adam_m_[i] / c1) / (std::sqrt(adam_v_[i] / c2) + eps);
    }
    params.unflatten(p);
    conv1_.import_params(params, "sem.conv1");
    conv2_.import_params(params, "sem.conv2");
    dense1_.import_params(params, "sem.dense1");
    dense2_.import_params(params, "sem.dense2");
    head_mu_.import_params(params, "sem.mu");
    head_logvar_.import_params(params, "sem.logvar");
    dec1_.import_params(params, "sem.dec1");
    dec2_.import_params(params, "sem.dec2");
    dec_out_.import_params(params, "sem.out");
}

std::vector<double> SemanticSampler::train(const std::vector<std::vector<double>>& vectors,
                                           std::size_t epochs, double lr, Rng& train_rng) {
    if (vectors.size() < 2) throw std::invalid_argument("SemanticSampler::train: need >= 2 vectors");
    for (const auto& v : vectors)
        if (v.size() != cfg_.input_dim)
            throw std::invalid_argument("SemanticSampler::train: vector length " +
                                        std::to_string(v.size()) + " != " + std::to_string(cfg_.input_dim));
    // re-fit standardization on every (re)train: client parameters drift over
    // global epochs and a stale centering would push refresh inputs far out of
    // the region the net was trained on
    input_mean_.assign(cfg_.input_dim, 0.0);
    for (const auto& v : vectors)
        for (std::size_t i = 0; i < cfg_.input_dim; ++i) input_mean_[i] += v[i];
    for (auto& m : input_mean_) m /= static_cast<double>(vectors.size());
    double var = 0.0;
    for (const auto& v : vectors)
        for (std::size_t i = 0; i < cfg_.input_dim; ++i) {
            double d = v[i] - input_mean_[i];
            var += d * d;
        }
    var /= static_cast<double>(vectors.size() * cfg_.input_dim);
    input_scale_ = std::max(std::sqrt(var), 1e-8);
    adam_t_ = 0;
    adam_m_.clear();
    adam_v_.clear();
    std::vector<std::vector<double>> xs;
    xs.reserve(vectors.size());
    for (const auto& v : vectors) xs.push_back(standardize(v));

    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> trace;
    for (std::size_t e = 0; e < epochs; ++e) {
        std::shuffle(order.begin(), order.end(), train_rng.engine());
        double total = 0.0;
        for (std::size_t idx : order) total += train_example(xs[idx], lr, train_rng);
        trace.push_back(total / static_cast<double>(xs.size()));
    }
    trained_ = true;
    return trace;
}

std::vector<double> SemanticSampler::embed(const std::vector<double>& m_u) const {
    if (!trained_) throw std::logic_error("SemanticSampler::embed: sampler has not been trained");
    if (m_u.size() != cfg_.input_dim)
        throw std::invalid_argument("SemanticSampler::embed: vector length " + std::to_string(m_u.size()) +
                                    " != " + std::to_string(cfg_.input_dim));
    std::vector<double> xs = standardize(m_u);
    Tensor x = Tensor::matrix(cfg_.input_dim, 1, xs);
    Tensor c1 = strided_conv_apply(conv1_, x, cfg_.kernel, cfg_.stride, cfg_.conv1_filters, 1);
    tanh_inplace(c1);
    Tensor c2 = strided_conv_apply(conv2_, c1, cfg_.kernel, cfg_.stride, cfg_.conv2_filters, cfg_.conv1_filters);
    tanh_inplace(c2);
    Tensor flat = Tensor::matrix(1, flat_dim_, c2.values);
    Tensor d1 = dense_apply(dense1_, flat);
    tanh_inplace(d1);
    Tensor d2 = dense_apply(dense2_, d1);
    tanh_inplace(d2);
    Tensor mu = dense_apply(head_mu_, d2);
    return mu.values;
}

ParameterSet SemanticSampler::checkpoint() const {
    ParameterSet ps;
    conv1_.export_params(ps, "sem.conv1");
    conv2_.export_params(ps, "sem.conv2");
    dense1_.export_params(ps, "sem.dense1");
    dense2_.export_params(ps, "sem.dense2");
    head_mu_.export_params(ps, "sem.mu");
    head_logvar_.export_params(ps, "sem.logvar");
    dec1_.export_params(ps, "sem.dec1");
    dec2_.export_params(ps, "sem.dec2");
    dec_out_.export_params(ps, "sem.out");
    ps.set("sem.std.mean", Tensor::row(input_mean_));
    ps.set("sem.std.scale", Tensor::row({input_scale_}));
    return ps;
}

void SemanticSampler::restore(const ParameterSet& ps) {
    conv1_.import_params(ps, "sem.conv1");
    conv2_.import_params(ps, "sem.conv2");
    dense1_.import_params(ps, "sem.dense1");
    dense2_.import_params(ps, "sem.dense2");
    head_mu_.import_params(ps, "sem.mu");
    head_logvar_.import_params(ps, "sem.logvar");
    dec1_.import_params(ps, "sem.dec1");
    dec2_.import_params(ps, "sem.dec2");
    dec_out_.import_params(ps, "sem.out");
    input_mean_ = ps.get("sem.std.mean").values;
    input_scale_ = ps.get("sem.std.scale").at(0);
    trained_ = true;
}

}  // namespace refed
