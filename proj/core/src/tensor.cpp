#include "refed/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace refed {

namespace {
std::size_t product(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (auto d : s) n *= d;
    return n;
}
}  // namespace

Tensor::Tensor(std::initializer_list<std::size_t> s) : shape(s), values(product(shape), 0.0) {}
Tensor::Tensor(const std::vector<std::size_t>& s) : shape(s), values(product(shape), 0.0) {}

Tensor Tensor::row(const std::vector<double>& v) {
    Tensor t;
    t.shape = {v.size()};
    t.values = v;
    return t;
}

Tensor Tensor::matrix(std::size_t r, std::size_t c, const std::vector<double>& v) {
    if (v.size() != r * c) throw std::invalid_argument("Tensor::matrix: value count mismatch");
    Tensor t;
    t.shape = {r, c};
    t.values = v;
    return t;
}

bool Tensor::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

void Tensor::fill(double v) {
    for (auto& x : values) x = v;
}

Tensor& Tensor::operator+=(const Tensor& o) {
    if (!same_shape(o)) throw std::invalid_argument("Tensor+=: shape mismatch " + shape_str() + " vs " + o.shape_str());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
}

Tensor& Tensor::operator-=(const Tensor& o) {
    if (!same_shape(o)) throw std::invalid_argument("Tensor-=: shape mismatch " + shape_str() + " vs " + o.shape_str());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
}

Tensor& Tensor::operator*=(double s) {
    for (auto& x : values) x *= s;
    return *this;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << ")";
    return os.str();
}

void require_shape(const Tensor& t, const std::vector<std::size_t>& expected, const std::string& who) {
    if (t.shape != expected) {
        Tensor e(expected);
        throw std::invalid_argument(who + ": expected shape " + e.shape_str() + ", got " + t.shape_str());
    }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: inner dims " + a.shape_str() + " x " + b.shape_str());
    Tensor out({a.rows(), b.cols()});
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double av = a.at(i, k);
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, j) += av * b.at(k, j);
        }
    return out;
}

Tensor matmul_tA(const Tensor& a, const Tensor& b) {
    if (a.rows() != b.rows())
        throw std::invalid_argument("matmul_tA: inner dims " + a.shape_str() + " x " + b.shape_str());
    Tensor out({a.cols(), b.cols()});
    for (std::size_t k = 0; k < a.rows(); ++k)
        for (std::size_t i = 0; i < a.cols(); ++i) {
            double av = a.at(k, i);
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, j) += av * b.at(k, j);
        }
    return out;
}

Tensor matmul_tB(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("matmul_tB: inner dims " + a.shape_str() + " x " + b.shape_str());
    Tensor out({a.rows(), b.rows()});
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a.at(i, k) * b.at(j, k);
            out.at(i, j) = s;
        }
    return out;
}

Tensor softmax_rows(const Tensor& logits) {
    Tensor out = logits;
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        double mx = logits.at(i, 0);
        for (std::size_t j = 1; j < logits.cols(); ++j) mx = std::max(mx, logits.at(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < logits.cols(); ++j) {
            double e = std::exp(logits.at(i, j) - mx);
            out.at(i, j) = e;
            sum += e;
        }
        for (std::size_t j = 0; j < logits.cols(); ++j) out.at(i, j) /= sum;
    }
    return out;
}

std::vector<double> softmax_vec(const std::vector<double>& logits) {
    Tensor t = Tensor::matrix(1, logits.size(), logits);
    return softmax_rows(t).values;
}

double squared_l2(const Tensor& t) {
    double s = 0.0;
    for (double v : t.values) s += v * v;
    return s;
}

double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace refed
