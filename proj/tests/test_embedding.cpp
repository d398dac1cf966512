#include <doctest.h>

#include <cmath>

#include "refed/dataset.hpp"
#include "refed/embedding.hpp"
#include "refed/sampler.hpp"

using namespace refed;

namespace {

EmbeddingConfig small_cfg() {
    EmbeddingConfig cfg;
    cfg.w = 6;
    cfg.feat_dim = 4;
    cfg.latent_dim = 4;
    cfg.conv1_filters = 6;
    cfg.conv2_filters = 4;
    cfg.codebook_size = 8;
    cfg.heads = 2;
    return cfg;
}

std::vector<WindowSample> toy_windows(const EmbeddingConfig& cfg, std::size_t n_items,
                                      std::size_t count) {
    ItemFeatureProvider feats(n_items, cfg.feat_dim, 5);
    std::vector<std::int64_t> stream;
    for (std::size_t i = 0; i < cfg.w + count; ++i)
        stream.push_back(static_cast<std::int64_t>(i % n_items));
    return make_windows(stream, cfg.w, feats);
}

}  // namespace

TEST_CASE("quantize equals brute-force nearest neighbor on a hand example") {
    // codebook rows (0,0), (1,1), (2,0); distances from (0.9, 1.2):
    // 1.5, sqrt(0.05) ~ 0.2236, sqrt(2.65) ~ 1.6279 -> row 1
    Tensor codebook = Tensor::matrix(3, 2, {0, 0, 1, 1, 2, 0});
    double v[2] = {0.9, 1.2};
    CHECK(nearest_code(codebook, v, 2) == 1);
    // exact tie between rows 0 and 1 from (0.5, 0.5): lowest index wins
    double tie[2] = {0.5, 0.5};
    CHECK(nearest_code(codebook, tie, 2) == 0);
}

TEST_CASE("embedding loss composes recon, codebook and commitment terms") {
    Tensor x = Tensor::matrix(1, 2, {0, 0});
    Tensor x_hat = Tensor::matrix(1, 2, {1, 0});
    Tensor z_e = Tensor::matrix(1, 2, {1, 1});
    Tensor e_sel = Tensor::matrix(1, 2, {0.8, 1.2});
    // recon 0.5, vq (0.04+0.04)/2 = 0.04, total 0.5 + 0.04 + 0.25*0.04
    CHECK(EmbeddingModel::loss_emb(x, x_hat, z_e, e_sel, 0.25) ==
          doctest::Approx(0.55).epsilon(1e-12));
    Tensor bad = Tensor::matrix(2, 1, {0, 0});
    CHECK_THROWS(EmbeddingModel::loss_emb(x, bad, z_e, e_sel, 0.25));
}

TEST_CASE("training a single window reduces its loss") {
    EmbeddingConfig cfg = small_cfg();
    EmbeddingModel model(cfg, Rng(7));
    auto windows = toy_windows(cfg, 6, 8);
    REQUIRE(windows.size() == 8);
    auto trace = model.train({windows}, 30, 0.02);
    REQUIRE(trace.size() == 30);
    CHECK(trace.back() < trace.front());
    CHECK(model.codebook_ready());
}

TEST_CASE("embed_window rows are codebook rows") {
    EmbeddingConfig cfg = small_cfg();
    EmbeddingModel model(cfg, Rng(8));
    auto windows = toy_windows(cfg, 6, 4);
    model.train({windows}, 3, 0.02);
    QuantizeResult q = model.embed_window(windows[0]);
    REQUIRE(q.indices.size() == cfg.w);
    REQUIRE(q.z.shape == std::vector<std::size_t>{cfg.w, cfg.latent_dim});
    for (std::size_t t = 0; t < cfg.w; ++t)
        for (std::size_t d = 0; d < cfg.latent_dim; ++d)
            CHECK(q.z.at(t, d) == model.codebook().at(q.indices[t], d));
    // embed_item returns the row at the last position
    auto item = model.embed_item(windows[0]);
    REQUIRE(item.size() == cfg.latent_dim);
}

TEST_CASE("shared payload is exactly the encoder subset and installs cleanly") {
    EmbeddingConfig cfg = small_cfg();
    EmbeddingModel a(cfg, Rng(9));
    EmbeddingModel b(cfg, Rng(10));
    ParameterSet payload = a.shared_payload();
    for (const auto& [name, t] : payload) CHECK(name.rfind("enc.", 0) == 0);
    CHECK(payload.total_size() > 0);

    b.install_shared(payload);
    CHECK(b.shared_payload().flatten() == payload.flatten());
    // non-encoder state is untouched by installation
    auto windows = toy_windows(cfg, 6, 2);
    a.train({windows}, 2, 0.02);
    ParameterSet before = b.checkpoint();
    b.install_shared(a.shared_payload());
    ParameterSet after = b.checkpoint();
    CHECK(before.subset("dec.").flatten() == after.subset("dec.").flatten());
}

TEST_CASE("checkpoint/restore round trip reproduces outputs") {
    EmbeddingConfig cfg = small_cfg();
    EmbeddingModel model(cfg, Rng(11));
    auto windows = toy_windows(cfg, 6, 4);
    model.train({windows}, 4, 0.02);
    ParameterSet ckpt = model.checkpoint();
    Tensor z1 = model.encode(windows[1].x);
    model.train({windows}, 2, 0.02);
    Tensor z2 = model.encode(windows[1].x);
    CHECK(z1.values != z2.values);
    model.restore(ckpt);
    Tensor z3 = model.encode(windows[1].x);
    CHECK(z3.values == z1.values);
}

TEST_CASE("no-attention variant still trains and embeds") {
    EmbeddingConfig cfg = small_cfg();
    cfg.use_attention = false;
    EmbeddingModel model(cfg, Rng(12));
    auto windows = toy_windows(cfg, 6, 6);
    auto trace = model.train({windows}, 20, 0.02);
    CHECK(trace.back() < trace.front());
    QuantizeResult q = model.embed_window(windows[0]);
    CHECK(q.indices.size() == cfg.w);
}
