#include "refed/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace refed {

void init_uniform(Tensor& t, std::size_t fan_in, Rng& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in == 0 ? 1 : fan_in));
    for (auto& v : t.values) v = rng.uniform(-bound, bound);
}

// ---------------------------------------------------------------- Dense

Dense::Dense(std::size_t in_dim, std::size_t out_dim)
    : W({out_dim, in_dim}), b({out_dim}), dW({out_dim, in_dim}), db({out_dim}),
      in_dim_(in_dim), out_dim_(out_dim) {}

void Dense::init(Rng& rng) {
    init_uniform(W, in_dim_, rng);
    init_uniform(b, in_dim_, rng);
}

Tensor Dense::forward(const Tensor& x) {
    if (x.cols() != in_dim_)
        throw std::invalid_argument("Dense::forward: expected " + std::to_string(in_dim_) +
                                    " input columns, got shape " + x.shape_str());
    last_input_ = x;
    Tensor y = matmul_tB(x, W);  // (n, out)
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t j = 0; j < out_dim_; ++j) y.at(i, j) += b.at(j);
    return y;
}

Tensor Dense::backward(const Tensor& upstream) {
    if (!last_input_) throw std::logic_error("Dense::backward called before forward");
    const Tensor& x = *last_input_;
    if (upstream.rows() != x.rows() || upstream.cols() != out_dim_)
        throw std::invalid_argument("Dense::backward: upstream shape " + upstream.shape_str());
    dW += matmul_tA(upstream, x);  // (out, in)
    for (std::size_t i = 0; i < upstream.rows(); ++i)
        for (std::size_t j = 0; j < out_dim_; ++j) db.at(j) += upstream.at(i, j);
    return matmul(upstream, W);  // (n, in)
}

void Dense::export_params(ParameterSet& ps, const std::string& p) const {
    ps.set(p + ".W", W);
    ps.set(p + ".b", b);
}
void Dense::import_params(const ParameterSet& ps, const std::string& p) {
    W = ps.get(p + ".W");
    b = ps.get(p + ".b");
}
void Dense::export_grads(ParameterSet& ps, const std::string& p) const {
    ps.set(p + ".W", dW);
    ps.set(p + ".b", db);
}
void Dense::zero_grads() {
    dW.fill(0.0);
    db.fill(0.0);
}
void Dense::apply_sgd(double lr) {
    for (std::size_t i = 0; i < W.size(); ++i) W.values[i] -= lr * dW.values[i];
    for (std::size_t i = 0; i < b.size(); ++i) b.values[i] -= lr * db.values[i];
}

// ---------------------------------------------------------------- Conv1D

Conv1D::Conv1D(std::size_t in_ch, std::size_t out_ch, std::size_t kernel)
    : W({out_ch, in_ch, kernel}), b({out_ch}), dW({out_ch, in_ch, kernel}), db({out_ch}),
      in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel) {}

void Conv1D::init(Rng& rng) {
    std::size_t fan_in = in_ch_ * kernel_;
    init_uniform(W, fan_in, rng);
    init_uniform(b, fan_in, rng);
}

Tensor Conv1D::forward(const Tensor& x) {
    if (x.cols() != in_ch_)
        throw std::invalid_argument("Conv1D::forward: expected " + std::to_string(in_ch_) +
                                    " channels, got shape " + x.shape_str());
    last_input_ = x;
    std::size_t len = x.rows();
    Tensor y({len, out_ch_});
    for (std::size_t t = 0; t < len; ++t)
        for (std::size_t oc = 0; oc < out_ch_; ++oc) {
            double s = b.at(oc);
            for (std::size_t j = 0; j < kernel_ && j <= t; ++j)
                for (std::size_t ic = 0; ic < in_ch_; ++ic)
                    s += W.at3(oc, ic, j) * x.at(t - j, ic);
            y.at(t, oc) = s;
        }
    return y;
}

Tensor Conv1D::backward(const Tensor& upstream) {
    if (!last_input_) throw std::logic_error("Conv1D::backward called before forward");
    const Tensor& x = *last_input_;
    std::size_t len = x.rows();
    if (upstream.rows() != len || upstream.cols() != out_ch_)
        throw std::invalid_argument("Conv1D::backward: upstream shape " + upstream.shape_str());
    Tensor dx({len, in_ch_});
    for (std::size_t t = 0; t < len; ++t)
        for (std::size_t oc = 0; oc < out_ch_; ++oc) {
            double u = upstream.at(t, oc);
            if (u == 0.0) continue;
            db.at(oc) += u;
            for (std::size_t j = 0; j < kernel_ && j <= t; ++j)
                for (std::size_t ic = 0; ic < in_ch_; ++ic) {
                    dW.at3(oc, ic, j) += u * x.at(t - j, ic);
                    dx.at(t - j, ic) += u * W.at3(oc, ic, j);
                }
        }
    return dx;
}

void Conv1D::export_params(ParameterSet& ps, const std::string& p) const {
    ps.set(p + ".W", W);
    ps.set(p + ".b", b);
}
void Conv1D::import_params(const ParameterSet& ps, const std::string& p) {
    W = ps.get(p + ".W");
    b = ps.get(p + ".b");
}
void Conv1D::export_grads(ParameterSet& ps, const std::string& p) const {
    ps.set(p + ".W", dW);
    ps.set(p + ".b", db);
}
void Conv1D::zero_grads() {
    dW.fill(0.0);
    db.fill(0.0);
}
void Conv1D::apply_sgd(double lr) {
    for (std::size_t i = 0; i < W.size(); ++i) W.values[i] -= lr * dW.values[i];
    for (std::size_t i = 0; i < b.size(); ++i) b.values[i] -= lr * db.values[i];
}

// ---------------------------------------------------------------- StridedConv1D

StridedConv1D::StridedConv1D(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, std::size_t stride)
    : W({out_ch, in_ch, kernel}), b({out_ch}), dW({out_ch, in_ch, kernel}), db({out_ch}),
      in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel), stride_(stride) {}

void StridedConv1D::init(Rng& rng) {
    std::size_t fan_in = in_ch_ * kernel_;
    init_uniform(W, fan_in, rng);
    init_uniform(b, fan_in, rng);
}

std::size_t StridedConv1D::out_len(std::size_t in_len) const {
    if (in_len < kernel_) return 0;
    return (in_len - kernel_) / stride_ + 1;
}

Tensor StridedConv1D::forward(const Tensor& x) {
    if (x.cols() != in_ch_)
        throw std::invalid_argument("StridedConv1D::forward: expected " + std::to_string(in_ch_) +
                                    " channels, got shape " + x.shape_str());
    last_input_ = x;
    std::size_t ol = out_len(x.rows());
    if (ol == 0) throw std::invalid_argument("StridedConv1D::forward: input shorter than kernel");
    Tensor y({ol, out_ch_});
    for (std::size_t t = 0; t < ol; ++t)
        for (std::size_t oc = 0; oc < out_ch_; ++oc) {
            double s = b.at(oc);
            for (std::size_t j = 0; j < kernel_; ++j)
                for (std::size_t ic = 0; ic < in_ch_; ++ic)
                    s += W.at3(oc, ic, j) * x.at(t * stride_ + j, ic);
            y.at(t, oc) = s;
        }
    return y;
}

Tensor StridedConv1D::backward(const Tensor& upstream) {
    if (!last_input_) throw std::logic_error("StridedConv1D::backward called before forward");
    const Tensor& x = *last_input_;
    std::size_t ol = out_len(x.rows());
    if (upstream.rows() != ol || upstream.cols() != out_ch_)
        throw std::invalid_argument("StridedConv1D::backward: upstream shape " + upstream.shape_str());
    Tensor dx({x.rows(), in_ch_});
    for (std::size_t t = 0; t < ol; ++t)
        for (std::size_t oc = 0; oc < out_ch_; ++oc) {
            double u = upstream.at(t, oc);
            if (u == 0.0) continue;
            db.at(oc) += u;
            for (std::size_t j = 0; j < kernel_; ++j)
                for (std::size_t ic = 0; ic < in_ch_; ++ic) {
                    dW.at3(oc, ic, j) += u * x.at(t * stride_ + j, ic);
                    dx.at(t * stride_ + j, ic) += u * W.at3(oc, ic, j);
                }
        }
    return dx;
}

void StridedConv1D::export_params(ParameterSet& ps, const std::string& p) const {
    ps.set(p + ".W", W);
    ps.set(p + ".b", b);
}
void StridedConv1D::import_params(const ParameterSet& ps, const std::string& p) {
    W = ps.get(p + ".W");
    b = ps.get(p + ".b");
}
void StridedConv1D::export_grads(ParameterSet& ps, const std::string& p) const {
    ps.set(p + ".W", dW);
    ps.set(p + ".b", db);
}
void StridedConv1D::zero_grads() {
    dW.fill(0.0);
    db.fill(0.0);
}
void StridedConv1D::apply_sgd(double lr) {
    for (std::size_t i = 0; i < W.size(); ++i) W.values[i] -= lr * dW.values[i];
    for (std::size_t i = 0; i < b.size(); ++i) b.values[i] -= lr * db.values[i];
}

// ---------------------------------------------------------------- Tanh

Tensor Tanh::forward(const Tensor& x) {
    Tensor y = x;
    for (auto& v : y.values) v = std::tanh(v);
    last_output_ = y;
    return y;
}

Tensor Tanh::backward(const Tensor& upstream) {
    if (!last_output_) throw std::logic_error("Tanh::backward called before forward");
    const Tensor& y = *last_output_;
    if (!upstream.same_shape(y))
        throw std::invalid_argument("Tanh::backward: shape " + upstream.shape_str() + " vs " + y.shape_str());
    Tensor dx = upstream;
    for (std::size_t i = 0; i < dx.size(); ++i) dx.values[i] *= 1.0 - y.values[i] * y.values[i];
    return dx;
}

// ---------------------------------------------------------------- GruCell

namespace {
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

GruCell::GruCell(std::size_t in_dim, std::size_t hid_dim)
    : Wz({hid_dim, in_dim}), Uz({hid_dim, hid_dim}), bz({hid_dim}),
      Wr({hid_dim, in_dim}), Ur({hid_dim, hid_dim}), br({hid_dim}),
      Wh({hid_dim, in_dim}), Uh({hid_dim, hid_dim}), bh({hid_dim}),
      dWz({hid_dim, in_dim}), dUz({hid_dim, hid_dim}), dbz({hid_dim}),
      dWr({hid_dim, in_dim}), dUr({hid_dim, hid_dim}), dbr({hid_dim}),
      dWh({hid_dim, in_dim}), dUh({hid_dim, hid_dim}), dbh({hid_dim}),
      in_(in_dim), hid_(hid_dim) {}

void GruCell::init(Rng& rng) {
    for (Tensor* t : {&Wz, &Wr, &Wh}) init_uniform(*t, in_, rng);
    for (Tensor* t : {&Uz, &Ur, &Uh}) init_uniform(*t, hid_, rng);
    for (Tensor* t : {&bz, &br, &bh}) init_uniform(*t, hid_, rng);
}

Tensor GruCell::run_sequence(const Tensor& xs) {
    if (xs.cols() != in_)
        throw std::invalid_argument("GruCell::run_sequence: expected " + std::to_string(in_) +
                                    " input dims, got shape " + xs.shape_str());
    if (xs.rows() == 0) throw std::invalid_argument("GruCell::run_sequence: empty sequence");
    steps_.clear();
    std::vector<double> h(hid_, 0.0);
    for (std::size_t t = 0; t < xs.rows(); ++t) {
        StepCache sc;
        sc.x.assign(xs.values.begin() + t * in_, xs.values.begin() + (t + 1) * in_);
        sc.h_prev = h;
        sc.z.resize(hid_);
        sc.r.resize(hid_);
        sc.n.resize(hid_);
        sc.uh_h.resize(hid_);
        for (std::size_t i = 0; i < hid_; ++i) {
            double az = bz.at(i), ar = br.at(i);
            for (std::size_t j = 0; j < in_; ++j) {
                az += Wz.at(i, j) * sc.x[j];
                ar += Wr.at(i, j) * sc.x[j];
            }
            for (std::size_t j = 0; j < hid_; ++j) {
                az += Uz.at(i, j) * sc.h_prev[j];
                ar += Ur.at(i, j) * sc.h_prev[j];
            }
            sc.z[i] = sigmoid(az);
            sc.r[i] = sigmoid(ar);
        }
        for (std::size_t i = 0; i < hid_; ++i) {
            double u = 0.0;
            for (std::size_t j = 0; j < hid_; ++j) u += Uh.at(i, j) * sc.h_prev[j];
            sc.uh_h[i] = u;
            double an = bh.at(i) + sc.r[i] * u;
            for (std::size_t j = 0; j < in_; ++j) an += Wh.at(i, j) * sc.x[j];
            sc.n[i] = std::tanh(an);
            h[i] = (1.0 - sc.z[i]) * sc.n[i] + sc.z[i] * sc.h_prev[i];
        }
        steps_.push_back(std::move(sc));
    }
    return Tensor::row(h);
}

Tensor GruCell::backward_sequence(const Tensor& d_final_h) {
    if (steps_.empty()) throw std::logic_error("GruCell::backward_sequence called before run_sequence");
    if (d_final_h.size() != hid_)
        throw std::invalid_argument("GruCell::backward_sequence: gradient shape " + d_final_h.shape_str());
    std::size_t T = steps_.size();
    Tensor dxs({T, in_});
    std::vector<double> dh(d_final_h.values);
    for (std::size_t tt = T; tt-- > 0;) {
        const StepCache& sc = steps_[tt];
        std::vector<double> dh_prev(hid_, 0.0);
        std::vector<double> dz_pre(hid_), dr_pre(hid_), dn_pre(hid_);
        for (std::size_t i = 0; i < hid_; ++i) {
            double dz = dh[i] * (sc.h_prev[i] - sc.n[i]);
            double dn = dh[i] * (1.0 - sc.z[i]);
            dh_prev[i] += dh[i] * sc.z[i];
            dn_pre[i] = dn * (1.0 - sc.n[i] * sc.n[i]);
            double dr = dn_pre[i] * sc.uh_h[i];
            dz_pre[i] = dz * sc.z[i] * (1.0 - sc.z[i]);
            dr_pre[i] = dr * sc.r[i] * (1.0 - sc.r[i]);
        }
        for (std::size_t i = 0; i < hid_; ++i) {
            dbz.at(i) += dz_pre[i];
            dbr.at(i) += dr_pre[i];
            dbh.at(i) += dn_pre[i];
            for (std::size_t j = 0; j < in_; ++j) {
                dWz.at(i, j) += dz_pre[i] * sc.x[j];
                dWr.at(i, j) += dr_pre[i] * sc.x[j];
                dWh.at(i, j) += dn_pre[i] * sc.x[j];
                dxs.at(tt, j) += Wz.at(i, j) * dz_pre[i] + Wr.at(i, j) * dr_pre[i] + Wh.at(i, j) * dn_pre[i];
            }
            double dnr = dn_pre[i] * sc.r[i];  // gradient into Uh h_prev
            for (std::size_t j = 0; j < hid_; ++j) {
                dUz.at(i, j) += dz_pre[i] * sc.h_prev[j];
                dUr.at(i, j) += dr_pre[i] * sc.h_prev[j];
                dUh.at(i, j) += dnr * sc.h_prev[j];
                dh_prev[j] += Uz.at(i, j) * dz_pre[i] + Ur.at(i, j) * dr_pre[i] + Uh.at(i, j) * dnr;
            }
        }
        dh = std::move(dh_prev);
    }
    return dxs;
}

void GruCell::export_params(ParameterSet& ps, const std::string& p) const {
    ps.set(p + ".Wz", Wz); ps.set(p + ".Uz", Uz); ps.set(p + ".bz", bz);
    ps.set(p + ".Wr", Wr); ps.set(p + ".Ur", Ur); ps.set(p + ".br", br);
    ps.set(p + ".Wh", Wh); ps.set(p + ".Uh", Uh); ps.set(p + ".bh", bh);
}
void GruCell::import_params(const ParameterSet& ps, const std::string& p) {
    Wz = ps.get(p + ".Wz"); Uz = ps.get(p + ".Uz"); bz = ps.get(p + ".bz");
    Wr = ps.get(p + ".Wr"); Ur = ps.get(p + ".Ur"); br = ps.get(p + ".br");
    Wh = ps.get(p + ".Wh"); Uh = ps.get(p + ".Uh"); bh = ps.get(p + ".bh");
}
void GruCell::export_grads(ParameterSet& ps, const std::string& p) const {
    ps.set(p + ".Wz", dWz); ps.set(p + ".Uz", dUz); ps.set(p + ".bz", dbz);
    ps.set(p + ".Wr", dWr); ps.set(p + ".Ur", dUr); ps.set(p + ".br", dbr);
    ps.set(p + ".Wh", dWh); ps.set(p + ".Uh", dUh); ps.set(p + ".bh", dbh);
}
void GruCell::zero_grads() {
    for (Tensor* t : {&dWz, &dUz, &dbz, &dWr, &dUr, &dbr, &dWh, &dUh, &dbh}) t->fill(0.0);
}
void GruCell::apply_sgd(double lr) {
    const std::pair<Tensor*, Tensor*> pairs[] = {
        {&Wz, &dWz}, {&Uz, &dUz}, {&bz, &dbz}, {&Wr, &dWr}, {&Ur, &dUr},
        {&br, &dbr}, {&Wh, &dWh}, {&Uh, &dUh}, {&bh, &dbh}};
    for (auto [p, g] : pairs)
        for (std::size_t i = 0; i < p->size(); ++i) p->values[i] -= lr * g->values[i];
}

// ---------------------------------------------------------------- MultiHeadAttention

MultiHeadAttention::MultiHeadAttention(std::size_t model_dim, std::size_t heads)
    : Wq({model_dim, model_dim}), Wk({model_dim, model_dim}),
      Wv({model_dim, model_dim}), Wo({model_dim, model_dim}),
      dWq({model_dim, model_dim}), dWk({model_dim, model_dim}),
      dWv({model_dim, model_dim}), dWo({model_dim, model_dim}),
      dm_(model_dim), heads_(heads) {
    if (heads == 0 || model_dim % heads != 0)
        throw std::invalid_argument("MultiHeadAttention: model dim " + std::to_string(model_dim) +
                                    " not divisible by " + std::to_string(heads) + " heads");
    dh_ = model_dim / heads;
}

void MultiHeadAttention::init(Rng& rng) {
    for (Tensor* t : {&Wq, &Wk, &Wv, &Wo}) init_uniform(*t, dm_, rng);
}

Tensor MultiHeadAttention::forward(const Tensor& q_in, const Tensor& kv_in) {
    if (q_in.cols() != dm_ || kv_in.cols() != dm_)
        throw std::invalid_argument("MultiHeadAttention::forward: shapes " + q_in.shape_str() +
                                    ", " + kv_in.shape_str() + " vs model dim " + std::to_string(dm_));
    q_in_ = q_in;
    kv_in_ = kv_in;
    Q_ = matmul(q_in, Wq);
    K_ = matmul(kv_in, Wk);
    V_ = matmul(kv_in, Wv);
    std::size_t n = q_in.rows(), m = kv_in.rows();
    attn_.assign(heads_, Tensor());
    Tensor concat({n, dm_});
    double scale = 1.0 / std::sqrt(static_cast<double>(dh_));
    for (std::size_t h = 0; h < heads_; ++h) {
        Tensor scores({n, m});
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                double s = 0.0;
                for (std::size_t d = 0; d < dh_; ++d)
                    s += Q_->at(i, h * dh_ + d) * K_->at(j, h * dh_ + d);
                scores.at(i, j) = s * scale;
            }
        Tensor A = softmax_rows(scores);
        attn_[h] = A;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < dh_; ++d) {
                double s = 0.0;
                for (std::size_t j = 0; j < m; ++j) s += A.at(i, j) * V_->at(j, h * dh_ + d);
                concat.at(i, h * dh_ + d) = s;
            }
    }
    concat_ = concat;
    return matmul(concat, Wo);
}

std::pair<Tensor, Tensor> MultiHeadAttention::backward(const Tensor& upstream) {
    if (!concat_) throw std::logic_error("MultiHeadAttention::backward called before forward");
    std::size_t n = q_in_->rows(), m = kv_in_->rows();
    if (upstream.rows() != n || upstream.cols() != dm_)
        throw std::invalid_argument("MultiHeadAttention::backward: upstream shape " + upstream.shape_str());
    dWo += matmul_tA(*concat_, upstream);
    Tensor dconcat = matmul_tB(upstream, Wo);

    Tensor dQ({n, dm_}), dK({m, dm_}), dV({m, dm_});
    double scale = 1.0 / std::sqrt(static_cast<double>(dh_));
    for (std::size_t h = 0; h < heads_; ++h) {
        const Tensor& A = attn_[h];
        // dA and dV from O = A V
        Tensor dA({n, m});
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                double s = 0.0;
                for (std::size_t d = 0; d < dh_; ++d)
                    s += dconcat.at(i, h * dh_ + d) * V_->at(j, h * dh_ + d);
                dA.at(i, j) = s;
            }
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t d = 0; d < dh_; ++d) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += A.at(i, j) * dconcat.at(i, h * dh_ + d);
                dV.at(j, h * dh_ + d) = s;
            }
        // softmax backward per row
        Tensor dS({n, m});
        for (std::size_t i = 0; i < n; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < m; ++j) dot += dA.at(i, j) * A.at(i, j);
            for (std::size_t j = 0; j < m; ++j) dS.at(i, j) = A.at(i, j) * (dA.at(i, j) - dot);
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < dh_; ++d) {
                double s = 0.0;
                for (std::size_t j = 0; j < m; ++j) s += dS.at(i, j) * K_->at(j, h * dh_ + d);
                dQ.at(i, h * dh_ + d) = s * scale;
            }
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t d = 0; d < dh_; ++d) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += dS.at(i, j) * Q_->at(i, h * dh_ + d);
                dK.at(j, h * dh_ + d) = s * scale;
            }
    }
    dWq += matmul_tA(*q_in_, dQ);
    dWk += matmul_tA(*kv_in_, dK);
    dWv += matmul_tA(*kv_in_, dV);
    Tensor dq_in = matmul_tB(dQ, Wq);
    Tensor dkv_in = matmul_tB(dK, Wk);
    dkv_in += matmul_tB(dV, Wv);
    return {dq_in, dkv_in};
}

void MultiHeadAttention::export_params(ParameterSet& ps, const std::string& p) const {
    ps.set(p + ".Wq", Wq); ps.set(p + ".Wk", Wk);
    ps.set(p + ".Wv", Wv); ps.set(p + ".Wo", Wo);
}
void MultiHeadAttention::import_params(const ParameterSet& ps, const std::string& p) {
    Wq = ps.get(p + ".Wq"); Wk = ps.get(p + ".Wk");
    Wv = ps.get(p + ".Wv"); Wo = ps.get(p + ".Wo");
}
void MultiHeadAttention::export_grads(ParameterSet& ps, const std::string& p) const {
    ps.set(p + ".Wq", dWq); ps.set(p + ".Wk", dWk);
    ps.set(p + ".Wv", dWv); ps.set(p + ".Wo", dWo);
}
void MultiHeadAttention::zero_grads() {
    for (Tensor* t : {&dWq, &dWk, &dWv, &dWo}) t->fill(0.0);
}
void MultiHeadAttention::apply_sgd(double lr) {
    const std::pair<Tensor*, Tensor*> pairs[] = {{&Wq, &dWq}, {&Wk, &dWk}, {&Wv, &dWv}, {&Wo, &dWo}};
    for (auto [p, g] : pairs)
        for (std::size_t i = 0; i < p->size(); ++i) p->values[i] -= lr * g->values[i];
}

}  // namespace refed
