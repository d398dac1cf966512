#include <benchmark/benchmark.h>

#include "refed/clustering.hpp"
#include "refed/embedding.hpp"
#include "refed/paillier.hpp"
#include "refed/rng.hpp"

namespace {

using namespace refed;

void BM_NearestCode(benchmark::State& state) {
    std::size_t J = static_cast<std::size_t>(state.range(0));
    Rng rng(7);
    Tensor codebook({J, 16});
    for (auto& v : codebook.values) v = rng.gaussian(0.0, 1.0);
    std::vector<double> q(16);
    for (auto& v : q) v = rng.gaussian(0.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(nearest_code(codebook, q.data(), 16));
    }
}
BENCHMARK(BM_NearestCode)->Arg(64)->Arg(256);

void BM_KMeans(benchmark::State& state) {
    std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(11);
    std::vector<std::vector<double>> pts(n, std::vector<double>(16));
    for (auto& p : pts)
        for (auto& v : p) v = rng.gaussian(0.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kmeans(pts, 4, rng.fork(1)));
    }
}
BENCHMARK(BM_KMeans)->Arg(40)->Arg(200);

void BM_Silhouette(benchmark::State& state) {
    std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(13);
    std::vector<std::vector<double>> pts(n, std::vector<double>(16));
    for (auto& p : pts)
        for (auto& v : p) v = rng.gaussian(0.0, 1.0);
    auto r = kmeans(pts, 4, rng.fork(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(mean_silhouette(pts, r.labels, 4));
    }
}
BENCHMARK(BM_Silhouette)->Arg(40)->Arg(200);

void BM_HeEncrypt(benchmark::State& state) {
    std::size_t dim = static_cast<std::size_t>(state.range(0));
    KeyAuthority auth(3);
    Rng rng(17);
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.gaussian(0.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(he_encrypt(v, auth.public_key(), rng));
    }
}
BENCHMARK(BM_HeEncrypt)->Arg(16)->Arg(64);

void BM_HeAggregateMean(benchmark::State& state) {
    std::size_t parties = static_cast<std::size_t>(state.range(0));
    KeyAuthority auth(3);
    Rng rng(19);
    std::vector<CipherVector> cts;
    std::vector<double> v(32);
    for (std::size_t p = 0; p < parties; ++p) {
        for (auto& x : v) x = rng.gaussian(0.0, 1.0);
        cts.push_back(he_encrypt(v, auth.public_key(), rng));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(he_aggregate_mean(cts, auth.public_key()));
    }
}
BENCHMARK(BM_HeAggregateMean)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
