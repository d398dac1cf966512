#include <doctest.h>

#include <cmath>

#include "refed/privacy.hpp"
#include "refed/tensor.hpp"

using namespace refed;

TEST_CASE("clipping caps the norm and leaves small gradients alone") {
    std::vector<double> g = {3.0, 4.0};  // norm 5
    clip_gradient(g, 1.0);
    CHECK(l2_norm(g) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g[0] == doctest::Approx(0.6));
    CHECK(g[1] == doctest::Approx(0.8));

    std::vector<double> small = {0.1, 0.2};
    std::vector<double> copy = small;
    clip_gradient(small, 1.0);
    CHECK(small == copy);
}

TEST_CASE("noiseless dp average equals the clipped mean") {
    DpConfig cfg;
    cfg.clip_norm = 1.0;
    cfg.noise_multiplier = 0.0;
    Rng rng(1);
    std::vector<std::vector<double>> grads = {{3.0, 4.0}, {0.3, 0.4}};
    auto avg = dp_average(grads, cfg, rng);
    CHECK(avg[0] == doctest::Approx((0.6 + 0.3) / 2.0));
    CHECK(avg[1] == doctest::Approx((0.8 + 0.4) / 2.0));
}

TEST_CASE("noise std tracks noise_multiplier * clip_norm") {
    DpConfig cfg;
    cfg.clip_norm = 2.0;
    cfg.noise_multiplier = 0.3;
    Rng rng(99);
    const std::size_t n = 10000;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto avg = dp_average({{0.0}}, cfg, rng);  // zero gradient: pure noise
        sum += avg[0];
        sumsq += avg[0] * avg[0];
    }
    double mean = sum / n;
    double std = std::sqrt(sumsq / n - mean * mean);
    double target = cfg.noise_multiplier * cfg.clip_norm;
    CHECK(std::abs(std - target) / target < 0.1);
    CHECK(std::abs(mean) < 0.05);
}

TEST_CASE("dp sgd step descends the noisy direction") {
    DpConfig cfg;
    cfg.clip_norm = 10.0;
    cfg.noise_multiplier = 0.0;
    Rng rng(5);
    auto out = dp_sgd_step({1.0, 2.0}, {{1.0, -1.0}}, cfg, 0.5, rng);
    CHECK(out == std::vector<double>{0.5, 2.5});
}

TEST_CASE("dp average validates its inputs") {
    DpConfig cfg;
    Rng rng(1);
    CHECK_THROWS(dp_average({}, cfg, rng));
    CHECK_THROWS(dp_average({{1.0}, {1.0, 2.0}}, cfg, rng));
    DpConfig bad;
    bad.clip_norm = 0.0;
    CHECK_THROWS(dp_average({{1.0}}, bad, rng));
}
