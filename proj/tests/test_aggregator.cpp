#include <doctest.h>

#include "refed/aggregator.hpp"
#include "refed/rng.hpp"

using namespace refed;

namespace {

// registry with n clients in one cluster, each holding a stored model
ClusterRegistry one_cluster(const std::vector<std::vector<double>>& models) {
    ClusterRegistry reg;
    std::vector<std::int64_t> ids;
    std::vector<std::vector<double>> pts;
    for (std::size_t i = 0; i < models.size() + 1; ++i) {
        ids.push_back(static_cast<std::int64_t>(i));
        pts.push_back({0.0});
    }
    SelectKOptions opts;
    reg.bootstrap(ids, pts, opts, Rng(1), 1);  // identical points: k = 1
    for (std::size_t i = 0; i < models.size(); ++i)
        reg.store_model(static_cast<std::int64_t>(i), models[i]);
    return reg;
}

}  // namespace

TEST_CASE("worked aggregation example") {
    // stored {[1,2],[3,4]}, incoming [5,6] -> elementwise mean [3,4]
    ClusterRegistry reg = one_cluster({{1, 2}, {3, 4}});
    Aggregator agg;
    AggregatePayload p = agg.aggregate(2, {5, 6}, 0, reg, 1);
    CHECK(p.m_agg == std::vector<double>{3, 4});
    CHECK(p.member_count == 3);
    CHECK(p.cluster_id == 0);
    // the incoming model is now stored
    CHECK(reg.stored_models().at(2) == std::vector<double>{5, 6});
}

TEST_CASE("resubmission replaces the stored copy instead of double counting") {
    ClusterRegistry reg = one_cluster({{0, 0}, {6, 6}});
    Aggregator agg;
    // client 0 resubmits [3, 3]; mean over {[3,3],[6,6]} not {[0,0],[3,3],[6,6]}
    AggregatePayload p = agg.aggregate(0, {3, 3}, 0, reg, 2);
    CHECK(p.m_agg == std::vector<double>{4.5, 4.5});
    CHECK(p.member_count == 2);
}

TEST_CASE("aggregate matches a mean oracle on random cluster configurations") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 1 + rng.index(7);
        std::size_t dim = 1 + rng.index(6);
        std::vector<std::vector<double>> stored;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> m(dim);
            for (auto& v : m) v = rng.uniform(-5, 5);
            stored.push_back(std::move(m));
        }
        std::vector<double> incoming(dim);
        for (auto& v : incoming) v = rng.uniform(-5, 5);

        std::vector<double> oracle(dim, 0.0);
        for (const auto& m : stored)
            for (std::size_t d = 0; d < dim; ++d) oracle[d] += m[d];
        for (std::size_t d = 0; d < dim; ++d)
            oracle[d] = (oracle[d] + incoming[d]) / static_cast<double>(n + 1);

        ClusterRegistry reg = one_cluster(stored);
        Aggregator agg;
        AggregatePayload p =
            agg.aggregate(static_cast<std::int64_t>(n), incoming, 0, reg, 1);
        REQUIRE(p.m_agg.size() == dim);
        for (std::size_t d = 0; d < dim; ++d)
            CHECK(std::abs(p.m_agg[d] - oracle[d]) <= 1e-9);
    }
}

TEST_CASE("fetch_global returns the latest payload per cluster") {
    ClusterRegistry reg = one_cluster({{2, 2}});
    Aggregator agg;
    CHECK_THROWS(agg.fetch_global(0));
    agg.aggregate(1, {4, 4}, 0, reg, 1);
    CHECK(agg.fetch_global(0).m_agg == std::vector<double>{3, 3});
    agg.aggregate(1, {6, 6}, 0, reg, 2);
    CHECK(agg.fetch_global(0).m_agg == std::vector<double>{4, 4});
    CHECK(agg.fetch_global(0).epoch == 2);
}
