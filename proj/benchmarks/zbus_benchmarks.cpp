#include <benchmark/benchmark.h>

#include <random>

#include "zbus/certificate.hpp"
#include "zbus/linalg.hpp"
#include "zbus/reference_networks.hpp"
#include "zbus/solver.hpp"
#include "zbus/system.hpp"

namespace {

using namespace zbus;

void BM_LuFactorSolve(benchmark::State& state) {
    auto const n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CMatrix a(n, n);
    CVector b(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = {u(rng), u(rng)};
        a(i, i) += static_cast<double>(n);
        b[i] = {u(rng), u(rng)};
    }
    for (auto _ : state) {
        CVector x = LuFactorization(a).solve(b);
        benchmark::DoNotOptimize(x.data());
    }
}
BENCHMARK(BM_LuFactorSolve)->Arg(6)->Arg(24)->Arg(96);

void BM_AssembleThreeNode(benchmark::State& state) {
    Feeder const f = three_node({0.08});
    for (auto _ : state) {
        SystemMatrices sys = assemble_system(f.network, f.loads);
        benchmark::DoNotOptimize(sys.w.data());
    }
}
BENCHMARK(BM_AssembleThreeNode);

void BM_SolveThreeNode(benchmark::State& state) {
    Feeder const f = three_node({static_cast<double>(state.range(0)) / 100.0});
    SystemMatrices const sys = assemble_system(f.network, f.loads);
    for (auto _ : state) {
        SolveTrace t = solve(f.network, f.loads, sys, {});
        benchmark::DoNotOptimize(t.diffs.data());
    }
}
BENCHMARK(BM_SolveThreeNode)->Arg(5)->Arg(10);

void BM_CertifyThreeNode(benchmark::State& state) {
    Feeder const f = three_node({0.08});
    SystemMatrices const sys = assemble_system(f.network, f.loads);
    for (auto _ : state) {
        CertificateResult c = certify(f.network, f.loads, sys, LambdaChoice::identity());
        benchmark::DoNotOptimize(c.r_max);
    }
}
BENCHMARK(BM_CertifyThreeNode);

void BM_CertifyRandom(benchmark::State& state) {
    Feeder const f = random_small_network({42, 5, 0.5});
    SystemMatrices const sys = assemble_system(f.network, f.loads);
    for (auto _ : state) {
        CertificateResult c = certify(f.network, f.loads, sys, LambdaChoice::diag_w());
        benchmark::DoNotOptimize(c.r_max);
    }
}
BENCHMARK(BM_CertifyRandom);

}  // namespace

BENCHMARK_MAIN();
