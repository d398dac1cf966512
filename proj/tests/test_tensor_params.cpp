#include <doctest.h>

#include <cstdio>

#include "refed/params.hpp"
#include "refed/tensor.hpp"

using namespace refed;

TEST_CASE("tensor shape and accessors") {
    Tensor t({2, 3});
    CHECK(t.size() == 6);
    t.at(1, 2) = 5.0;
    CHECK(t.values[5] == 5.0);
    CHECK(t.shape_str() == "(2,3)");
    CHECK_THROWS(require_shape(t, {3, 2}, "test"));
}

TEST_CASE("tensor arithmetic checks shapes") {
    Tensor a({2, 2}), b({2, 3});
    CHECK_THROWS(a += b);
    Tensor c({2, 2});
    c.fill(1.0);
    a += c;
    a *= 3.0;
    CHECK(a.values[0] == 3.0);
}

TEST_CASE("matmul against a hand example") {
    // [1 2; 3 4] * [5 6; 7 8] = [19 22; 43 50]
    Tensor a = Tensor::matrix(2, 2, {1, 2, 3, 4});
    Tensor b = Tensor::matrix(2, 2, {5, 6, 7, 8});
    Tensor c = matmul(a, b);
    CHECK(c.values == std::vector<double>{19, 22, 43, 50});
    // A^T B and A B^T agree with explicit transposition
    Tensor at = Tensor::matrix(2, 2, {1, 3, 2, 4});
    CHECK(matmul_tA(at, b).values == c.values);
    Tensor bt = Tensor::matrix(2, 2, {5, 7, 6, 8});
    CHECK(matmul_tB(a, bt).values == c.values);
}

TEST_CASE("softmax rows sum to one and match a hand value") {
    Tensor l = Tensor::matrix(1, 3, {1.0, 0.0, 1.0});
    Tensor s = softmax_rows(l);
    double sum = s.values[0] + s.values[1] + s.values[2];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.values[0] == doctest::Approx(0.4223187982515182).epsilon(1e-10));
    CHECK(s.values[1] == doctest::Approx(0.1553624034969635).epsilon(1e-10));
    // shift invariance
    Tensor l2 = Tensor::matrix(1, 3, {101.0, 100.0, 101.0});
    Tensor s2 = softmax_rows(l2);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(s2.values[i] == doctest::Approx(s.values[i]).epsilon(1e-12));
}

TEST_CASE("parameter set flattens in lexicographic name order") {
    ParameterSet ps;
    ps.set("b", Tensor::row({3, 4}));
    ps.set("a", Tensor::row({1, 2}));
    CHECK(ps.flatten() == std::vector<double>{1, 2, 3, 4});
    ps.unflatten({9, 8, 7, 6});
    CHECK(ps.get("a").values == std::vector<double>{9, 8});
    CHECK(ps.get("b").values == std::vector<double>{7, 6});
}

TEST_CASE("parameter set subset and sgd step") {
    ParameterSet ps;
    ps.set("enc.w", Tensor::row({1, 1}));
    ps.set("dec.w", Tensor::row({5}));
    ParameterSet enc = ps.subset("enc.");
    CHECK(enc.entry_count() == 1);
    ParameterSet g;
    g.set("enc.w", Tensor::row({2, 4}));
    g.set("dec.w", Tensor::row({0}));
    ParameterSet stepped = ParameterSet::sgd_step(ps, g, 0.5);
    CHECK(stepped.get("enc.w").values == std::vector<double>{0, -1});
}

TEST_CASE("parameter set serialization round trip") {
    ParameterSet ps;
    ps.set("m", Tensor::matrix(2, 2, {1.5, -2.25, 0.0, 1e-12}));
    ps.set("v", Tensor::row({42.0}));
    auto bytes = ps.serialize();
    ParameterSet back = ParameterSet::deserialize(bytes);
    CHECK(back.names() == ps.names());
    CHECK(back.get("m").values == ps.get("m").values);
    CHECK(back.get("m").shape == ps.get("m").shape);

    std::string path = "params_roundtrip.bin";
    ps.save(path);
    ParameterSet loaded = ParameterSet::load(path);
    CHECK(loaded.flatten() == ps.flatten());
    std::remove(path.c_str());
}
