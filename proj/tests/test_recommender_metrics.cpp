#include <doctest.h>

#include <cmath>

#include "refed/metrics.hpp"
#include "refed/recommender.hpp"
#include "refed/rng.hpp"

using namespace refed;

TEST_CASE("rank_of with descending-score, ascending-id tie break") {
    std::vector<double> scores = {0.1, 0.5, 0.5, 0.9};
    CHECK(rank_of(scores, 3) == 1);
    CHECK(rank_of(scores, 1) == 2);  // ties go to the lower id
    CHECK(rank_of(scores, 2) == 3);
    CHECK(rank_of(scores, 0) == 4);
    CHECK_THROWS(rank_of(scores, 4));
    CHECK_THROWS(rank_of(scores, -1));
}

TEST_CASE("hit rate and ndcg at the rank boundary") {
    CHECK(hr_at_k(1, 10) == 1);
    CHECK(hr_at_k(10, 10) == 1);
    CHECK(hr_at_k(11, 10) == 0);
    CHECK(ndcg_at_k(1, 10) == doctest::Approx(1.0));
    CHECK(ndcg_at_k(11, 10) == 0.0);
    // rank 9: 1/log2(10)
    CHECK(ndcg_at_k(9, 10) == doctest::Approx(0.30102999566398120).epsilon(1e-10));
    CHECK_THROWS(hr_at_k(0));
    CHECK_THROWS(ndcg_at_k(0));
}

TEST_CASE("evaluate averages over evaluated clients and counts skips") {
    std::vector<RankResult> ranks = {{0, 1}, {1, 11}, {2, 0}, {3, 2}};
    EvalSummary s = evaluate(ranks, 10);
    CHECK(s.evaluated == 3);
    CHECK(s.skipped == 1);
    CHECK(s.mean_hr == doctest::Approx(2.0 / 3.0));
    CHECK(s.mean_ndcg ==
          doctest::Approx((1.0 + 0.0 + 1.0 / std::log2(3.0)) / 3.0).epsilon(1e-12));
}

TEST_CASE("top_k orders by score then by item id") {
    std::vector<double> scores = {0.3, 0.9, 0.3, 0.1};
    auto top = Recommender::top_k(scores, 3);
    CHECK(top == std::vector<std::int64_t>{1, 0, 2});
}

TEST_CASE("recommender scores form a distribution and training fits a toy sequence") {
    RecommenderConfig cfg;
    cfg.latent_dim = 4;
    cfg.n_items = 6;
    Recommender rec(cfg, Rng(3));

    // windows alternate between two items; target is always item 5
    Tensor emb = Tensor::matrix(3, 4, {0.5, 0, 0, 0, 0, 0.5, 0, 0, 0.5, 0, 0, 0});
    Tensor h = rec.sequence_repr(emb);
    auto scores = rec.score(h);
    REQUIRE(scores.size() == 6);
    double sum = 0.0;
    for (double s : scores) sum += s;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

    std::vector<RecPair> pairs = {{emb, 5}};
    Rng trng(1);
    auto trace = rec.train(pairs, 60, 0.1, trng);
    CHECK(trace.back() < trace.front());
    auto after = rec.score(rec.sequence_repr(emb));
    CHECK(rank_of(after, 5) == 1);
}

TEST_CASE("installed item codes are frozen rows of the item matrix") {
    RecommenderConfig cfg;
    cfg.latent_dim = 4;
    cfg.n_items = 3;
    cfg.heads = 2;
    Recommender rec(cfg, Rng(4));
    CHECK_FALSE(rec.item_seen(1));
    rec.set_item_code(1, {0.25, -0.75, 0.5, 0.0});
    CHECK(rec.item_seen(1));
    CHECK(rec.item_matrix().at(1, 0) == 0.25);
    CHECK(rec.item_matrix().at(1, 1) == -0.75);
}

TEST_CASE("attention backend produces the same catalog distribution shape") {
    RecommenderConfig cfg;
    cfg.backend = RecommenderBackend::kAttention;
    cfg.latent_dim = 4;
    cfg.n_items = 5;
    cfg.heads = 2;
    Recommender rec(cfg, Rng(5));
    Tensor emb = Tensor::matrix(3, 4, {0.1, 0.2, 0.3, 0.4, -0.1, 0.0, 0.1, 0.2, 0.3, -0.2, 0.0, 0.1});
    auto scores = rec.score(rec.sequence_repr(emb));
    REQUIRE(scores.size() == 5);
    double sum = 0.0;
    for (double s : scores) sum += s;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}
