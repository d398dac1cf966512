#include "refed/privacy.hpp"

#include <stdexcept>

#include "refed/tensor.hpp"

namespace refed {

void clip_gradient(std::vector<double>& g, double clip_norm) {
    double norm = l2_norm(g);
    if (norm > clip_norm && norm > 0.0) {
        double s = clip_norm / norm;
        for (auto& v : g) v *= s;
    }
}

std::vector<double> dp_average(const std::vector<std::vector<double>>& per_example,
                               const DpConfig& cfg, Rng& rng) {
    if (per_example.empty()) throw std::invalid_argument("dp_average: no per-example gradients");
    if (cfg.clip_norm <= 0.0) throw std::invalid_argument("dp_average: clip_norm must be > 0");
    std::size_t dim = per_example[0].size();
    std::vector<double> mean(dim, 0.0);
    for (const auto& g0 : per_example) {
        if (g0.size() != dim) throw std::invalid_argument("dp_average: gradient length mismatch");
        std::vector<double> g = g0;
        clip_gradient(g, cfg.clip_norm);
        for (std::size_t i = 0; i < dim; ++i) mean[i] += g[i];
    }
    double inv = 1.0 / static_cast<double>(per_example.size());
    double noise_std = cfg.noise_multiplier * cfg.clip_norm;
    for (std::size_t i = 0; i < dim; ++i) {
        mean[i] *= inv;
        if (noise_std > 0.0) mean[i] += rng.gaussian(0.0, noise_std);
    }
    return mean;
}

std::vector<double> dp_sgd_step(const std::vector<double>& params,
                                const std::vector<std::vector<double>>& per_example,
                                const DpConfig& cfg, double lr, Rng& rng) {
    auto update = dp_average(per_example, cfg, rng);
    if (update.size() != params.size())
        throw std::invalid_argument("dp_sgd_step: gradient/parameter length mismatch");
    std::vector<double> out = params;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= lr * update[i];
    return out;
}

}  // namespace refed
