#include <benchmark/benchmark.h>

#include "bqc/multipliers.hpp"
#include "bqc/rng.hpp"

using namespace bqc;

static void BM_weight_w(benchmark::State& state) {
    MultiplierParams mp;
    Rng rng(1);
    std::vector<std::tuple<long long, double, double>> pts;
    for (int i = 0; i < 1024; ++i) {
        const double eta = rng.uniform(3.0, 1e4);
        pts.emplace_back(rng.uniform_int(1, 32), eta, rng.uniform(0.0, 2.2 * eta));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& [k, eta, t] = pts[i++ & 1023];
        benchmark::DoNotOptimize(weight_w(k, eta, t, mp));
    }
}
BENCHMARK(BM_weight_w);

static void BM_log_multiplier_A(benchmark::State& state) {
    MultiplierParams mp;
    const LambdaFn lam(mp);
    Rng rng(2);
    std::vector<std::tuple<long long, double, double, double>> pts;
    for (int i = 0; i < 1024; ++i) {
        const double t = rng.uniform(0.0, 100.0);
        pts.emplace_back(rng.uniform_int(1, 85), rng.uniform(-32.0, 32.0), t, lam(t));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& [k, eta, t, lt] = pts[i++ & 1023];
        benchmark::DoNotOptimize(log_multiplier_A(k, eta, t, lt, mp, AVariant::A));
    }
}
BENCHMARK(BM_log_multiplier_A);

static void BM_lambda_of_t(benchmark::State& state) {
    MultiplierParams mp;
    const LambdaFn lam(mp);
    double t = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(lam(t));
        t = t < 1e6 ? t * 1.5 : 1.0;
    }
}
BENCHMARK(BM_lambda_of_t);
