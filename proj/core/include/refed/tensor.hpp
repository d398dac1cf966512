#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace refed {

/// Dense row-major tensor of doubles. Rank 1 and 2 cover everything in this
/// project; conv kernels use rank 3 (out_ch, in_ch, kernel).
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> values;

    Tensor() = default;
    Tensor(std::initializer_list<std::size_t> s);
    explicit Tensor(const std::vector<std::size_t>& s);

    static Tensor zeros(std::initializer_list<std::size_t> s) { return Tensor(s); }
    static Tensor row(const std::vector<double>& v);
    static Tensor matrix(std::size_t r, std::size_t c, const std::vector<double>& v);

    std::size_t size() const { return values.size(); }
    std::size_t rank() const { return shape.size(); }
    std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
    std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

    double& at(std::size_t i) { return values[i]; }
    double at(std::size_t i) const { return values[i]; }
    double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    double& at3(std::size_t a, std::size_t b, std::size_t c) {
        return values[(a * shape[1] + b) * shape[2] + c];
    }
    double at3(std::size_t a, std::size_t b, std::size_t c) const {
        return values[(a * shape[1] + b) * shape[2] + c];
    }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
    bool all_finite() const;
    void fill(double v);

    Tensor& operator+=(const Tensor& o);
    Tensor& operator-=(const Tensor& o);
    Tensor& operator*=(double s);

    std::string shape_str() const;
};

/// Throws std::invalid_argument naming expected vs actual shape.
void require_shape(const Tensor& t, const std::vector<std::size_t>& expected,
                   const std::string& who);

Tensor matmul(const Tensor& a, const Tensor& b);            // (n,k) x (k,m)
Tensor matmul_tA(const Tensor& a, const Tensor& b);         // a^T b
Tensor matmul_tB(const Tensor& a, const Tensor& b);         // a b^T

/// Row-wise softmax; rows sum to 1.
Tensor softmax_rows(const Tensor& logits);
std::vector<double> softmax_vec(const std::vector<double>& logits);

double squared_l2(const Tensor& t);
double l2_norm(const std::vector<double>& v);

}  // namespace refed
