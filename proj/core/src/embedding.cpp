#include "refed/embedding.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace refed {

std::size_t nearest_code(const Tensor& codebook, const double* v, std::size_t dim) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < codebook.rows(); ++j) {
        double d = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            double diff = codebook.at(j, k) - v[k];
            d += diff * diff;
        }
        if (d < best_d) {  // strict: ties go to the lowest index
            best_d = d;
            best = j;
        }
    }
    return best;
}

EmbeddingModel::EmbeddingModel(const EmbeddingConfig& cfg, Rng init_rng)
    : cfg_(cfg), rng_(init_rng),
      enc_conv1_(cfg.feat_dim, cfg.conv1_filters, cfg.kernel),
      enc_conv2_(cfg.conv1_filters, cfg.conv2_filters, cfg.kernel),
      enc_proj_(cfg.conv2_filters, cfg.latent_dim),
      codebook_({cfg.codebook_size, cfg.latent_dim}),
      d_codebook_({cfg.codebook_size, cfg.latent_dim}),
      attn_(cfg.latent_dim, cfg.heads),
      dec_proj_(cfg.latent_dim, cfg.conv2_filters),
      dec_conv1_(cfg.conv2_filters, cfg.conv1_filters, cfg.kernel),
      dec_conv2_(cfg.conv1_filters, cfg.feat_dim, cfg.kernel) {
    if (cfg.codebook_size < 2) throw std::invalid_argument("EmbeddingModel: codebook size must be >= 2");
    enc_conv1_.init(rng_);
    enc_conv2_.init(rng_);
    enc_proj_.init(rng_);
    attn_.init(rng_);
    dec_proj_.init(rng_);
    dec_conv1_.init(rng_);
    dec_conv2_.init(rng_);
}

Tensor EmbeddingModel::encode(const Tensor& x) {
    if (x.cols() != cfg_.feat_dim)
        throw std::invalid_argument("EmbeddingModel::encode: expected (w," + std::to_string(cfg_.feat_dim) +
                                    "), got " + x.shape_str());
    Tensor h = enc_conv1_.forward(x);
    h = enc_act1_.forward(h);
    h = enc_conv2_.forward(h);
    h = enc_act2_.forward(h);
    return enc_proj_.forward(h);
}

Tensor EmbeddingModel::encoder_backward(const Tensor& d_z_e) {
    Tensor d = enc_proj_.backward(d_z_e);
    d = enc_act2_.backward(d);
    d = enc_conv2_.backward(d);
    d = enc_act1_.backward(d);
    return enc_conv1_.backward(d);
}

QuantizeResult EmbeddingModel::quantize(const Tensor& z_e) const {
    if (!codebook_ready_)
        throw std::logic_error("EmbeddingModel::quantize: codebook has not been initialized");
    QuantizeResult out;
    out.z = Tensor({z_e.rows(), cfg_.latent_dim});
    out.indices.resize(z_e.rows());
    for (std::size_t t = 0; t < z_e.rows(); ++t) {
        std::size_t j = nearest_code(codebook_, &z_e.values[t * cfg_.latent_dim], cfg_.latent_dim);
        out.indices[t] = j;
        for (std::size_t k = 0; k < cfg_.latent_dim; ++k) out.z.at(t, k) = codebook_.at(j, k);
    }
    return out;
}

Tensor EmbeddingModel::attend(const Tensor& z, const Tensor& z_e) {
    return attn_.forward(z, z_e);
}

Tensor EmbeddingModel::decode(const Tensor& z_a) {
    if (z_a.cols() != cfg_.latent_dim)
        throw std::invalid_argument("EmbeddingModel::decode: expected (w," + std::to_string(cfg_.latent_dim) +
                                    "), got " + z_a.shape_str());
    Tensor h = dec_proj_.forward(z_a);
    h = dec_act1_.forward(h);
    h = dec_conv1_.forward(h);
    h = dec_act2_.forward(h);
    return dec_conv2_.forward(h);
}

double EmbeddingModel::loss_emb(const Tensor& x, const Tensor& x_hat, const Tensor& z_e,
                                const Tensor& e_sel, double beta_vq) {
    if (!x.same_shape(x_hat))
        throw std::invalid_argument("loss_emb: reconstruction shape " + x_hat.shape_str() +
                                    " vs input " + x.shape_str());
    if (!z_e.same_shape(e_sel))
        throw std::invalid_argument("loss_emb: latent shape mismatch");
    double recon = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x_hat.values[i] - x.values[i];
        recon += d * d;
    }
    recon /= static_cast<double>(x.size());
    double vq = 0.0;
    for (std::size_t i = 0; i < z_e.size(); ++i) {
        double d = z_e.values[i] - e_sel.values[i];
        vq += d * d;
    }
    vq /= static_cast<double>(z_e.size());
    return recon + vq + beta_vq * vq;
}

void EmbeddingModel::seed_codebook(const std::vector<WindowSample>& batch) {
    if (batch.empty()) throw std::invalid_argument("seed_codebook: empty batch");
    std::vector<std::vector<double>> rows;
    for (const auto& s : batch) {
        Tensor z_e = encode(s.x);
        for (std::size_t t = 0; t < z_e.rows(); ++t)
            rows.emplace_back(z_e.values.begin() + t * cfg_.latent_dim,
                              z_e.values.begin() + (t + 1) * cfg_.latent_dim);
    }
    for (std::size_t j = 0; j < cfg_.codebook_size; ++j) {
        const auto& src = rows[j % rows.size()];
        for (std::size_t k = 0; k < cfg_.latent_dim; ++k)
            codebook_.at(j, k) = src[k] + rng_.gaussian(0.0, 0.01);
    }
    codebook_ready_ = true;
}

double EmbeddingModel::train_example(const WindowSample& sample) {
    const Tensor& x = sample.x;
    Tensor z_e = encode(x);
    QuantizeResult q = quantize(z_e);
    Tensor z_a = cfg_.use_attention ? attend(q.z, z_e) : q.z;
    Tensor x_hat = decode(z_a);
    double loss = loss_emb(x, x_hat, z_e, q.z, cfg_.beta_vq);

    // reconstruction gradient
    Tensor d_xhat = x_hat;
    double inv_recon = 2.0 / static_cast<double>(x.size());
    for (std::size_t i = 0; i < d_xhat.size(); ++i)
        d_xhat.values[i] = inv_recon * (x_hat.values[i] - x.values[i]);

    Tensor d_za = dec_conv2_.backward(d_xhat);
    d_za = dec_act2_.backward(d_za);
    d_za = dec_conv1_.backward(d_za);
    d_za = dec_act1_.backward(d_za);
    d_za = dec_proj_.backward(d_za);

    Tensor d_z, d_ze;
    if (cfg_.use_attention) {
        auto [dq, dkv] = attn_.backward(d_za);
        d_z = dq;
        d_ze = dkv;
    } else {
        d_z = d_za;
        d_ze = Tensor({z_e.rows(), cfg_.latent_dim});
    }

    // straight-through: the gradient at z passes to z_e unchanged
    d_ze += d_z;

    // commitment term pulls z_e toward its code; codebook term (stop-gradient
    // on z_e) pulls the selected codes toward z_e
    double inv_lat = 2.0 / static_cast<double>(z_e.size());
    for (std::size_t t = 0; t < z_e.rows(); ++t) {
        std::size_t j = q.indices[t];
        for (std::size_t k = 0; k < cfg_.latent_dim; ++k) {
            double diff = z_e.at(t, k) - q.z.at(t, k);
            d_ze.at(t, k) += cfg_.beta_vq * inv_lat * diff;
            d_codebook_.at(j, k) += -inv_lat * diff;
        }
    }

    encoder_backward(d_ze);
    return loss;
}

std::vector<double> EmbeddingModel::train(const std::vector<std::vector<WindowSample>>& batches,
                                          std::size_t epochs, double lr,
                                          const DpConfig* dp, Rng* dp_rng) {
    bool any = false;
    for (const auto& b : batches) any = any || !b.empty();
    if (!any) throw std::invalid_argument("EmbeddingModel::train: no training windows");
    if (!codebook_ready_) {
        for (const auto& b : batches)
            if (!b.empty()) { seed_codebook(b); break; }
    }
    std::vector<double> trace;
    for (std::size_t e = 0; e < epochs; ++e) {
        double total = 0.0;
        std::size_t count = 0;
        for (const auto& batch : batches) {
            if (batch.empty()) continue;
            if (dp) {
                std::vector<std::vector<double>> per_example;
                per_example.reserve(batch.size());
                for (const auto& s : batch) {
                    zero_grads();
                    total += train_example(s);
                    ++count;
                    per_example.push_back(gradients().flatten());
                }
                auto noisy = dp_average(per_example, *dp, *dp_rng);
                ParameterSet g = gradients();
                g.unflatten(noisy);
                ParameterSet ps = checkpoint();
                restore(ParameterSet::sgd_step(ps, g, lr));
            } else {
                zero_grads();
                for (const auto& s : batch) {
                    total += train_example(s);
                    ++count;
                }
                double step = lr / static_cast<double>(batch.size());
                enc_conv1_.apply_sgd(step);
                enc_conv2_.apply_sgd(step);
                enc_proj_.apply_sgd(step);
                attn_.apply_sgd(step);
                dec_proj_.apply_sgd(step);
                dec_conv1_.apply_sgd(step);
                dec_conv2_.apply_sgd(step);
                for (std::size_t i = 0; i < codebook_.size(); ++i)
                    codebook_.values[i] -= step * d_codebook_.values[i];
            }
        }
        trace.push_back(total / static_cast<double>(count));
    }
    return trace;
}

QuantizeResult EmbeddingModel::embed_window(const WindowSample& sample) {
    return quantize(encode(sample.x));
}

std::vector<double> EmbeddingModel::embed_item(const WindowSample& sample) {
    QuantizeResult q = embed_window(sample);
    std::size_t last = q.z.rows() - 1;
    return {q.z.values.begin() + last * cfg_.latent_dim,
            q.z.values.begin() + (last + 1) * cfg_.latent_dim};
}

ParameterSet EmbeddingModel::shared_payload() const {
    ParameterSet ps;
    enc_conv1_.export_params(ps, "enc.conv1");
    enc_conv2_.export_params(ps, "enc.conv2");
    enc_proj_.export_params(ps, "enc.proj");
    return ps;
}

void EmbeddingModel::install_shared(const ParameterSet& encoder_params) {
    enc_conv1_.import_params(encoder_params, "enc.conv1");
    enc_conv2_.import_params(encoder_params, "enc.conv2");
    enc_proj_.import_params(encoder_params, "enc.proj");
}

ParameterSet EmbeddingModel::checkpoint() const {
    ParameterSet ps = shared_payload();
    ps.set("vq.codebook", codebook_);
    attn_.export_params(ps, "attn");
    dec_proj_.export_params(ps, "dec.proj");
    dec_conv1_.export_params(ps, "dec.conv1");
    dec_conv2_.export_params(ps, "dec.conv2");
    return ps;
}

void EmbeddingModel::restore(const ParameterSet& ps) {
    install_shared(ps);
    codebook_ = ps.get("vq.codebook");
    codebook_ready_ = true;
    attn_.import_params(ps, "attn");
    dec_proj_.import_params(ps, "dec.proj");
    dec_conv1_.import_params(ps, "dec.conv1");
    dec_conv2_.import_params(ps, "dec.conv2");
}

ParameterSet EmbeddingModel::gradients() const {
    ParameterSet ps;
    enc_conv1_.export_grads(ps, "enc.conv1");
    enc_conv2_.export_grads(ps, "enc.conv2");
    enc_proj_.export_grads(ps, "enc.proj");
    ps.set("vq.codebook", d_codebook_);
    attn_.export_grads(ps, "attn");
    dec_proj_.export_grads(ps, "dec.proj");
    dec_conv1_.export_grads(ps, "dec.conv1");
    dec_conv2_.export_grads(ps, "dec.conv2");
    return ps;
}

void EmbeddingModel::zero_grads() {
    enc_conv1_.zero_grads();
    enc_conv2_.zero_grads();
    enc_proj_.zero_grads();
    d_codebook_.fill(0.0);
    attn_.zero_grads();
    dec_proj_.zero_grads();
    dec_conv1_.zero_grads();
    dec_conv2_.zero_grads();
}

void EmbeddingModel::apply_grads(const ParameterSet& grads, double lr) {
    ParameterSet ps = checkpoint();
    restore(ParameterSet::sgd_step(ps, grads, lr));
}

}  // namespace refed
