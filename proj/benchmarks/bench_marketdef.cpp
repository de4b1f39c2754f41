#include <benchmark/benchmark.h>

#include "marketdef/cla.hpp"
#include "marketdef/clustering.hpp"
#include "marketdef/concentration.hpp"
#include "marketdef/demand.hpp"
#include "marketdef/linalg.hpp"
#include "marketdef/rng.hpp"

using namespace marketdef;

namespace {

Matrix random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(RngSeed{seed, 0});
    Matrix m(n, d);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) m(r, c) = rng.next_normal();
    return m;
}

} // namespace

static void BM_Lloyd(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix data = random_points(n, 9, 1);
    const Matrix init = kmeanspp_seed(data, 3, RngSeed{2, 0});
    for (auto _ : state) {
        auto a = lloyd(data, init);
        benchmark::DoNotOptimize(a.tot_within_ss);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Lloyd)->RangeMultiplier(2)->Range(32, 512)->Complexity();

static void BM_KmeansppSeed(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix data = random_points(n, 9, 3);
    for (auto _ : state) {
        auto centers = kmeanspp_seed(data, 5, RngSeed{4, 0});
        benchmark::DoNotOptimize(centers);
    }
}
BENCHMARK(BM_KmeansppSeed)->Arg(64)->Arg(256);

static void BM_KmeansRestarts(benchmark::State& state) {
    const Matrix data = random_points(64, 9, 5);
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto a = kmeans_restarts(data, 3, 100, RngSeed{6, 0}, std::nullopt, Seeding::kmeanspp,
                                 threads);
        benchmark::DoNotOptimize(a.tot_within_ss);
    }
}
BENCHMARK(BM_KmeansRestarts)->Arg(1)->Arg(4);

static void BM_HclustComplete(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix data = random_points(n, 9, 7);
    for (auto _ : state) {
        auto dend = hclust_complete(data);
        benchmark::DoNotOptimize(dend.merges.back().height);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HclustComplete)->RangeMultiplier(2)->Range(32, 256)->Complexity();

static void BM_GapStatistic(benchmark::State& state) {
    const Matrix data = random_points(30, 9, 8);
    for (auto _ : state) {
        auto rep = gap_statistic(data, 8, 10, 10, RngSeed{9, 0});
        benchmark::DoNotOptimize(rep.selected_k_gap);
    }
}
BENCHMARK(BM_GapStatistic)->Unit(benchmark::kMillisecond);

static void BM_EigenSymmetric(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const Matrix pts = random_points(3 * d, d, 10);
    const Matrix cov = covariance(pts);
    for (auto _ : state) {
        auto eig = eigen_symmetric(cov);
        benchmark::DoNotOptimize(eig.values[0]);
    }
}
BENCHMARK(BM_EigenSymmetric)->Arg(9)->Arg(30);

static void BM_OlsFit(benchmark::State& state) {
    Rng rng(RngSeed{11, 0});
    const std::size_t m = 200, p = 6;
    Matrix design(m, p);
    std::vector<double> y(m);
    for (std::size_t r = 0; r < m; ++r) {
        y[r] = rng.next_normal();
        for (std::size_t c = 0; c < p; ++c) design(r, c) = rng.next_normal();
    }
    for (auto _ : state) {
        auto coefs = ols_fit(y, design, 0, false);
        benchmark::DoNotOptimize(coefs[0]);
    }
}
BENCHMARK(BM_OlsFit);

static void BM_CriticalLossSweep(benchmark::State& state) {
    for (auto _ : state) {
        double acc = 0.0;
        for (int i = 1; i <= 90; ++i) acc += critical_loss(0.05, i / 100.0);
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_CriticalLossSweep);

static void BM_Hhi(benchmark::State& state) {
    MarketShares shares;
    const int n = static_cast<int>(state.range(0));
    for (int i = 0; i < n; ++i) {
        shares.labels.push_back("f" + std::to_string(i));
        shares.shares_pct.push_back(100.0 / n);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(hhi(shares));
    }
}
BENCHMARK(BM_Hhi)->Arg(10)->Arg(100);

BENCHMARK_MAIN();
