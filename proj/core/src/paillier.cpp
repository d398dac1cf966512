#include "refed/paillier.hpp"

#include <cmath>
#include <stdexcept>

namespace refed {

namespace {

mpz_class u64_to_mpz(std::uint64_t v) {
    mpz_class out;
    mpz_import(out.get_mpz_t(), 1, 1, 8, 0, 0, &v);
    return out;
}

mpz_class random_exact_bits(Rng& rng, std::size_t bits) {
    mpz_class out = 0;
    std::size_t chunks = (bits + 63) / 64;
    for (std::size_t i = 0; i < chunks; ++i) {
        out <<= 64;
        out += u64_to_mpz(rng.next_u64());
    }
    // trim and force the top bit so the prime has full size
    mpz_class mask = (mpz_class(1) << bits) - 1;
    out &= mask;
    out |= mpz_class(1) << (bits - 1);
    return out;
}

mpz_class random_prime(Rng& rng, std::size_t bits) {
    mpz_class cand = random_exact_bits(rng, bits);
    mpz_class prime;
    mpz_nextprime(prime.get_mpz_t(), cand.get_mpz_t());
    return prime;
}

mpz_class paillier_L(const mpz_class& u, const mpz_class& n) { return (u - 1) / n; }

mpz_class fixed_point_encode(double v, unsigned scale_bits, const mpz_class& n) {
    double scaled = std::ldexp(v, static_cast<int>(scale_bits));
    if (!std::isfinite(scaled)) throw std::invalid_argument("he_encrypt: non-finite value");
    mpz_class m;
    mpz_set_d(m.get_mpz_t(), std::nearbyint(scaled));
    if (m < 0) m += n;  // negatives wrap into the top half of Z_n
    m %= n;
    return m;
}

double fixed_point_decode(mpz_class m, unsigned scale_bits, const mpz_class& n) {
    if (m > n / 2) m -= n;
    return std::ldexp(m.get_d(), -static_cast<int>(scale_bits));
}

void check_compat(const CipherVector& a, const CipherVector& b) {
    if (a.key_id != b.key_id)
        throw std::invalid_argument("he: key id mismatch (" + std::to_string(a.key_id) + " vs " +
                                    std::to_string(b.key_id) + ")");
    if (a.scale_bits != b.scale_bits)
        throw std::invalid_argument("he: fixed-point scale mismatch (2^" + std::to_string(a.scale_bits) +
                                    " vs 2^" + std::to_string(b.scale_bits) + ")");
    if (a.c.size() != b.c.size()) throw std::invalid_argument("he: ciphertext length mismatch");
}

}  // namespace

KeyAuthority::KeyAuthority(std::uint64_t seed, std::size_t modulus_bits) {
    Rng rng(seed);
    std::size_t half = modulus_bits / 2;
    mpz_class p = random_prime(rng, half);
    mpz_class q = random_prime(rng, half);
    while (q == p) q = random_prime(rng, half);
    mpz_class n = p * q;
    mpz_class n2 = n * n;
    mpz_class lambda;
    {
        mpz_class p1 = p - 1, q1 = q - 1;
        mpz_lcm(lambda.get_mpz_t(), p1.get_mpz_t(), q1.get_mpz_t());
    }
    // g = n + 1, so L(g^lambda mod n^2) = lambda mod n and mu = lambda^-1 mod n
    mpz_class g = n + 1;
    mpz_class glambda;
    mpz_powm(glambda.get_mpz_t(), g.get_mpz_t(), lambda.get_mpz_t(), n2.get_mpz_t());
    mpz_class l = paillier_L(glambda, n);
    mpz_class mu;
    if (mpz_invert(mu.get_mpz_t(), l.get_mpz_t(), n.get_mpz_t()) == 0)
        throw std::runtime_error("KeyAuthority: L(g^lambda) not invertible; retry with another seed");
    std::uint64_t key_id = rng.next_u64();
    pub_ = PublicKey{n, n2, key_id};
    priv_.lambda = lambda;
    priv_.mu = mu;
    priv_.n = n;
    priv_.n_squared = n2;
    priv_.key_id = key_id;
}

CipherVector he_encrypt(const std::vector<double>& values, const PublicKey& pub, Rng& rng,
                        unsigned scale_bits) {
    CipherVector out;
    out.scale_bits = scale_bits;
    out.key_id = pub.key_id;
    out.c.reserve(values.size());
    for (double v : values) {
        mpz_class m = fixed_point_encode(v, scale_bits, pub.n);
        mpz_class r;
        do {
            r = random_exact_bits(rng, mpz_sizeinbase(pub.n.get_mpz_t(), 2) - 1);
            r %= pub.n;
        } while (r == 0);
        // c = (1 + m*n) * r^n mod n^2
        mpz_class rn;
        mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pub.n.get_mpz_t(), pub.n_squared.get_mpz_t());
        mpz_class c = ((1 + m * pub.n) % pub.n_squared) * rn % pub.n_squared;
        out.c.push_back(c);
    }
    return out;
}

std::vector<double> he_decrypt(const CipherVector& cv, const PrivateKey& priv) {
    if (cv.key_id != priv.key_id)
        throw std::invalid_argument("he_decrypt: ciphertext was produced under a different key");
    ++(*priv.decrypt_calls);
    std::vector<double> out;
    out.reserve(cv.c.size());
    for (const auto& c : cv.c) {
        mpz_class u;
        mpz_powm(u.get_mpz_t(), c.get_mpz_t(), priv.lambda.get_mpz_t(), priv.n_squared.get_mpz_t());
        mpz_class m = paillier_L(u, priv.n) * priv.mu % priv.n;
        out.push_back(fixed_point_decode(m, cv.scale_bits, priv.n));
    }
    return out;
}

CipherVector he_add(const CipherVector& a, const CipherVector& b, const PublicKey& pub) {
    check_compat(a, b);
    CipherVector out;
    out.scale_bits = a.scale_bits;
    out.key_id = a.key_id;
    out.c.reserve(a.c.size());
    for (std::size_t i = 0; i < a.c.size(); ++i)
        out.c.push_back(a.c[i] * b.c[i] % pub.n_squared);
    return out;
}

CipherVector he_scalar_mult(const CipherVector& cv, double scalar, const PublicKey& pub) {
    double scaled = std::ldexp(scalar, static_cast<int>(kScalarPrecisionBits));
    mpz_class t;
    mpz_set_d(t.get_mpz_t(), std::nearbyint(scaled));
    bool negative = t < 0;
    if (negative) t = -t;
    CipherVector out;
    out.scale_bits = cv.scale_bits + kScalarPrecisionBits;
    out.key_id = cv.key_id;
    out.c.reserve(cv.c.size());
    for (const auto& c : cv.c) {
        mpz_class base = c;
        if (negative) {
            if (mpz_invert(base.get_mpz_t(), base.get_mpz_t(), pub.n_squared.get_mpz_t()) == 0)
                throw std::runtime_error("he_scalar_mult: ciphertext not invertible");
        }
        mpz_class r;
        mpz_powm(r.get_mpz_t(), base.get_mpz_t(), t.get_mpz_t(), pub.n_squared.get_mpz_t());
        out.c.push_back(r);
    }
    return out;
}

CipherVector he_aggregate_mean(const std::vector<CipherVector>& inputs, const PublicKey& pub) {
    if (inputs.empty()) throw std::invalid_argument("he_aggregate_mean: no inputs");
    CipherVector sum = inputs[0];
    for (std::size_t i = 1; i < inputs.size(); ++i) sum = he_add(sum, inputs[i], pub);
    return he_scalar_mult(sum, 1.0 / static_cast<double>(inputs.size()), pub);
}

}  // namespace refed
