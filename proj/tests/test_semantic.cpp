#include <doctest.h>

#include <cmath>

#include "refed/clustering.hpp"
#include "refed/semantic.hpp"

using namespace refed;

namespace {

SemanticConfig small_cfg(std::size_t input_dim) {
    SemanticConfig cfg;
    cfg.input_dim = input_dim;
    cfg.latent_dim = 3;
    cfg.conv1_filters = 8;
    cfg.conv2_filters = 4;
    cfg.kernel = 4;
    cfg.stride = 4;
    cfg.dense_units = 8;
    return cfg;
}

// two groups of parameter vectors around distinct anchors
std::vector<std::vector<double>> two_groups(std::size_t dim, std::size_t per_group, Rng& rng) {
    std::vector<std::vector<double>> out;
    for (std::size_t g = 0; g < 2; ++g) {
        std::vector<double> anchor(dim);
        for (auto& v : anchor) v = rng.uniform(-1, 1) + (g ? 3.0 : -3.0);
        for (std::size_t i = 0; i < per_group; ++i) {
            std::vector<double> v = anchor;
            for (auto& x : v) x += rng.gaussian(0, 0.05);
            out.push_back(std::move(v));
        }
    }
    return out;
}

}  // namespace

TEST_CASE("closed-form gaussian KL") {
    // KL(N(0, I) || N(0, I)) = 0
    CHECK(SemanticSampler::gaussian_kl({0, 0}, {0, 0}) == doctest::Approx(0.0));
    // one dimension, mu = 1, logvar = 0: 0.5 * (1 + 1 - 1 - 0) = 0.5
    CHECK(SemanticSampler::gaussian_kl({1}, {0}) == doctest::Approx(0.5));
    // mu = 0, var = e: 0.5 * (e - 1 - 1)
    CHECK(SemanticSampler::gaussian_kl({0}, {1}) ==
          doctest::Approx(0.5 * (std::exp(1.0) - 2.0)).epsilon(1e-12));
}

TEST_CASE("embedding is deterministic and refuses wrong-length input") {
    std::size_t dim = 32;
    SemanticSampler s(small_cfg(dim), Rng(3));
    Rng rng(5);
    auto vecs = two_groups(dim, 4, rng);
    Rng trng(7);
    s.train(vecs, 20, 1e-3, trng);
    auto e1 = s.embed(vecs[0]);
    auto e2 = s.embed(vecs[0]);
    CHECK(e1 == e2);
    REQUIRE(e1.size() == 3);
    CHECK_THROWS(s.embed(std::vector<double>(dim + 1, 0.0)));
}

TEST_CASE("training reduces the loss and separates coarse structure") {
    std::size_t dim = 64;
    SemanticSampler s(small_cfg(dim), Rng(11));
    Rng rng(13);
    auto vecs = two_groups(dim, 8, rng);
    Rng trng(17);
    auto trace = s.train(vecs, 120, 2e-3, trng);
    CHECK(trace.back() < trace.front());
    CHECK(s.trained());

    std::vector<std::vector<double>> embeds;
    for (const auto& v : vecs) embeds.push_back(s.embed(v));
    KMeansResult r = kmeans_restarts(embeds, 2, Rng(1));
    // the two anchor groups land in different clusters
    for (std::size_t i = 1; i < 8; ++i) CHECK(r.labels[i] == r.labels[0]);
    for (std::size_t i = 9; i < 16; ++i) CHECK(r.labels[i] == r.labels[8]);
    CHECK(r.labels[0] != r.labels[8]);
}

TEST_CASE("identical inputs collapse to identical embeddings") {
    std::size_t dim = 32;
    SemanticSampler s(small_cfg(dim), Rng(19));
    std::vector<double> v(dim, 0.5);
    std::vector<std::vector<double>> vecs(6, v);
    Rng trng(23);
    s.train(vecs, 30, 1e-3, trng);
    auto a = s.embed(vecs[0]);
    auto b = s.embed(vecs[5]);
    CHECK(a == b);
}

TEST_CASE("checkpoint/restore reproduces embeddings") {
    std::size_t dim = 32;
    SemanticSampler s(small_cfg(dim), Rng(29));
    Rng rng(31);
    auto vecs = two_groups(dim, 4, rng);
    Rng trng(37);
    s.train(vecs, 30, 1e-3, trng);
    ParameterSet ckpt = s.checkpoint();
    auto before = s.embed(vecs[0]);
    s.train(vecs, 10, 1e-3, trng);
    s.restore(ckpt);
    CHECK(s.embed(vecs[0]) == before);
}
