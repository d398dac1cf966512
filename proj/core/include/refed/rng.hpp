#pragma once

#include <cstdint>
#include <random>

namespace refed {

/// Single injected source of randomness. Every component takes an Rng (or a
/// seed to derive one from); nothing touches global RNG state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed), base_(seed) {}

    /// Deterministic child stream, e.g. per client or per purpose.
    Rng fork(std::uint64_t salt) const { return Rng(seed_mix(salt)); }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    double gaussian(double mean, double stddev) {
        return std::normal_distribution<double>(mean, stddev)(gen_);
    }
    std::uint64_t next_u64() { return gen_(); }
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_);
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::uint64_t seed_mix(std::uint64_t salt) const {
        // splitmix64 over (base seed, salt); forks never share streams
        std::uint64_t x = base_ ^ (salt + 0x9e3779b97f4a7c15ULL);
        x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27; x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return x;
    }

    std::mt19937_64 gen_;
    std::uint64_t base_;
};

}  // namespace refed
