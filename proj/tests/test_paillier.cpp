#include <doctest.h>

#include <cmath>

#include "refed/paillier.hpp"

using namespace refed;

TEST_CASE("encrypt/decrypt round trip at fixed-point resolution") {
    KeyAuthority auth(42, 256);
    Rng rng(1);
    std::vector<double> v = {0.5, -1.25, 3.141592653589793, 0.0, -100.75};
    CipherVector ct = he_encrypt(v, auth.public_key(), rng);
    std::vector<double> back = he_decrypt(ct, auth.issue_private_key());
    REQUIRE(back.size() == v.size());
    double tol = std::pow(2.0, -16);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(back[i] - v[i]) <= tol);
}

TEST_CASE("ciphertexts are randomized but decrypt identically") {
    KeyAuthority auth(42, 256);
    Rng rng(1);
    std::vector<double> v = {1.0, 2.0};
    CipherVector a = he_encrypt(v, auth.public_key(), rng);
    CipherVector b = he_encrypt(v, auth.public_key(), rng);
    CHECK(a.c[0] != b.c[0]);  // semantic security: fresh randomness per call
    CHECK(he_decrypt(a, auth.issue_private_key()) == he_decrypt(b, auth.issue_private_key()));
}

TEST_CASE("homomorphic addition matches plaintext addition") {
    KeyAuthority auth(7, 256);
    Rng rng(2);
    std::vector<double> a = {0.25, -3.5, 10.0};
    std::vector<double> b = {1.75, 0.5, -2.25};
    CipherVector ca = he_encrypt(a, auth.public_key(), rng);
    CipherVector cb = he_encrypt(b, auth.public_key(), rng);
    CipherVector sum = he_add(ca, cb, auth.public_key());
    std::vector<double> dec = he_decrypt(sum, auth.issue_private_key());
    double tol = std::pow(2.0, -15);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(dec[i] - (a[i] + b[i])) <= tol);
}

TEST_CASE("scalar multiplication by a real factor") {
    KeyAuthority auth(7, 256);
    Rng rng(3);
    std::vector<double> v = {3.0, -6.0, 0.5};
    CipherVector cv = he_encrypt(v, auth.public_key(), rng);
    CipherVector scaled = he_scalar_mult(cv, 1.0 / 3.0, auth.public_key());
    CHECK(scaled.scale_bits == cv.scale_bits + kScalarPrecisionBits);
    std::vector<double> dec = he_decrypt(scaled, auth.issue_private_key());
    double tol = std::pow(2.0, -14);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(dec[i] - v[i] / 3.0) <= tol);
}

TEST_CASE("aggregate mean stays within the fixed-point bound") {
    KeyAuthority auth(9, 256);
    Rng rng(4);
    const std::size_t n = 5, dim = 8;
    std::vector<std::vector<double>> plain(n, std::vector<double>(dim));
    std::vector<CipherVector> cts;
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& x : plain[i]) x = rng.uniform(-2, 2);
        cts.push_back(he_encrypt(plain[i], auth.public_key(), rng));
    }
    CipherVector agg = he_aggregate_mean(cts, auth.public_key());
    std::vector<double> dec = he_decrypt(agg, auth.issue_private_key());
    double tol = static_cast<double>(n) * std::pow(2.0, -14);
    for (std::size_t d = 0; d < dim; ++d) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += plain[i][d];
        mean /= static_cast<double>(n);
        CHECK(std::abs(dec[d] - mean) <= tol);
    }
}

TEST_CASE("mismatched keys or scales are rejected") {
    KeyAuthority a1(1, 256), a2(2, 256);
    Rng rng(5);
    CipherVector c1 = he_encrypt({1.0}, a1.public_key(), rng);
    CipherVector c2 = he_encrypt({1.0}, a2.public_key(), rng);
    CHECK_THROWS(he_add(c1, c2, a1.public_key()));
    CipherVector c3 = he_encrypt({1.0}, a1.public_key(), rng, 20);
    CHECK_THROWS(he_add(c1, c3, a1.public_key()));
    CHECK_THROWS(he_aggregate_mean({}, a1.public_key()));
}

TEST_CASE("decrypt calls are counted through the shared counter") {
    KeyAuthority auth(3, 256);
    Rng rng(6);
    CHECK(auth.decrypt_call_count() == 0);
    CipherVector ct = he_encrypt({1.0}, auth.public_key(), rng);
    he_decrypt(ct, auth.issue_private_key());
    he_decrypt(ct, auth.issue_private_key());
    CHECK(auth.decrypt_call_count() == 2);
}
