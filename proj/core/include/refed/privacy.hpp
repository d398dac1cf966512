#pragma once

#include <cstddef>
#include <vector>

#include "refed/rng.hpp"

namespace refed {

struct DpConfig {
    double clip_norm = 1.0;        // C
    double noise_multiplier = 0.3; // sigma; noise std = sigma * C
    std::size_t microbatch = 1;
};

/// Scales g by min(1, C/||g||_2) in place.
void clip_gradient(std::vector<double>& g, double clip_norm);

/// Per-example gradients -> clipped per-coordinate mean plus Gaussian noise
/// with std noise_multiplier * clip_norm. Returns the noisy mean gradient.
std::vector<double> dp_average(const std::vector<std::vector<double>>& per_example,
                               const DpConfig& cfg, Rng& rng);

/// params' = params - lr * dp_average(grads).
std::vector<double> dp_sgd_step(const std::vector<double>& params,
                                const std::vector<std::vector<double>>& per_example,
                                const DpConfig& cfg, double lr, Rng& rng);

}  // namespace refed
