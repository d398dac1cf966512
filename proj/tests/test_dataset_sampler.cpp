#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "refed/dataset.hpp"
#include "refed/sampler.hpp"

using namespace refed;

TEST_CASE("item features are unit norm and deterministic") {
    ItemFeatureProvider a(10, 8, 7);
    ItemFeatureProvider b(10, 8, 7);
    for (std::int64_t i = 0; i < 10; ++i) {
        const auto& f = a.features(i);
        REQUIRE(f.size() == 8);
        double n = 0.0;
        for (double v : f) n += v * v;
        CHECK(n == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(f == b.features(i));
        CHECK(a.nearest_item(f) == i);
    }
    ItemFeatureProvider c(10, 8, 8);
    CHECK(a.features(0) != c.features(0));
}

TEST_CASE("clustered item features form tight prototype blocks") {
    // 12 items in 4 contiguous blocks of 3
    ItemFeatureProvider p(12, 8, 5, 4, 0.2);
    ItemFeatureProvider q(12, 8, 5, 4, 0.2);
    auto dist = [](const std::vector<double>& x, const std::vector<double>& y) {
        double d = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) d += (x[j] - y[j]) * (x[j] - y[j]);
        return d;
    };
    double within = 0.0, between = 0.0;
    std::size_t nw = 0, nb = 0;
    for (std::int64_t i = 0; i < 12; ++i) {
        double n = 0.0;
        for (double v : p.features(i)) n += v * v;
        CHECK(n == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(p.features(i) == q.features(i));
        for (std::int64_t j = i + 1; j < 12; ++j) {
            double d = dist(p.features(i), p.features(j));
            if (i / 3 == j / 3) { within += d; ++nw; }
            else { between += d; ++nb; }
        }
    }
    CHECK(within / static_cast<double>(nw) < between / static_cast<double>(nb));

    CHECK_THROWS(ItemFeatureProvider(4, 8, 5, 5));
    CHECK_THROWS(ItemFeatureProvider(8, 8, 5, 2, 0.0));
}

TEST_CASE("window count for a full stream") {
    // stream of 100 with w = 16: targets at positions 16..99
    std::vector<std::int64_t> stream(100);
    for (std::size_t i = 0; i < 100; ++i) stream[i] = static_cast<std::int64_t>(i % 7);
    ItemFeatureProvider feats(7, 4, 1);
    auto windows = make_windows(stream, 16, feats);
    CHECK(windows.size() == 84);
    CHECK(windows.front().position == 16);
    CHECK(windows.front().target_item == stream[16]);
    CHECK(windows.front().window_items.size() == 16);
    CHECK(windows.front().x.shape == std::vector<std::size_t>{16, 4});
    // last window predicts the final item
    CHECK(windows.back().target_item == stream[99]);
}

TEST_CASE("sessions tile the stream and per-session windows concatenate") {
    std::vector<std::int64_t> stream(120);
    for (std::size_t i = 0; i < 120; ++i) stream[i] = static_cast<std::int64_t>(i % 5);
    auto sessions = make_sessions(stream, 100, 16);
    REQUIRE(sessions.size() == 2);
    CHECK(sessions[0].start == 0);
    CHECK(sessions[0].items.size() == 100);
    CHECK(sessions[1].start == 100);
    CHECK(sessions[1].items.size() == 20);

    ItemFeatureProvider feats(5, 4, 1);
    auto all = make_windows(stream, 16, feats);
    std::size_t per_session = 0;
    for (const auto& s : sessions) per_session += make_windows(stream, s, 16, feats).size();
    CHECK(per_session == all.size());
    // windows in the second session reach back across the boundary
    auto w2 = make_windows(stream, sessions[1], 16, feats);
    REQUIRE(!w2.empty());
    CHECK(w2.front().position == 100);
}

TEST_CASE("synthetic clients carry disjoint group vocabularies") {
    SyntheticSpec spec;
    spec.n_users = 12;
    spec.n_groups = 3;
    spec.in_group_prob = 1.0;
    spec.repeat_prob = 0.0;
    Dataset ds = synthesize(spec);
    REQUIRE(ds.users.size() == 12);
    for (const auto& u : ds.users) {
        REQUIRE(u.hidden_group.has_value());
        int g = *u.hidden_group;
        for (auto it : u.items) {
            CHECK(it >= g * 12);
            CHECK(it < (g + 1) * 12);
        }
    }
    // same seed, same data
    Dataset ds2 = synthesize(spec);
    CHECK(ds2.users[5].items == ds.users[5].items);
}

TEST_CASE("synthesize rejects impossible shapes") {
    SyntheticSpec spec;
    spec.n_groups = 5;
    spec.items_per_group = 12;
    spec.n_items = 48;
    CHECK_THROWS(synthesize(spec));
}

TEST_CASE("ingest drops short users and orders by timestamp") {
    std::string path = "ingest_test.tsv";
    {
        std::ofstream f(path);
        f << "user\titem\tts\n";          // header should be skipped
        f << "1\t10\t300\n1\t11\t100\n1\t12\t200\n";
        f << "2\t5\t1\n";                 // too short, dropped
    }
    Dataset ds = ingest(path, 3);
    std::remove(path.c_str());
    REQUIRE(ds.users.size() == 1);
    CHECK(ds.dropped_users == 1);
    CHECK(ds.users[0].items == std::vector<std::int64_t>{11, 12, 10});
}

TEST_CASE("leave-one-out split holds out the last event") {
    UserStream u;
    for (std::int64_t i = 0; i < 30; ++i) u.items.push_back(i);
    auto split = leave_one_out_split(u, 16);
    CHECK(split.train.size() == 29);
    CHECK(split.test_target == 29);
    REQUIRE(split.test_window.size() == 16);
    CHECK(split.test_window.front() == 13);
    CHECK(split.test_window.back() == 28);
}
