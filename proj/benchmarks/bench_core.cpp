#include <benchmark/benchmark.h>

#include <random>

#include "ioc/default_instance.hpp"
#include "ioc/lower_level.hpp"
#include "ioc/relaxed_solver.hpp"

namespace {

void BM_EllipticSolve(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const ioc::EllipticOperator A(ioc::Grid::build(N));
    const ioc::Vec rhs(N, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(A.solve(rhs));
    state.SetComplexityN(N);
}
BENCHMARK(BM_EllipticSolve)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void BM_SimplexProjection(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ioc::AdmissibleSetX X = ioc::AdmissibleSetX::simplex(n);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d;
    ioc::Vec x(n);
    for (double& v : x) v = d(rng);
    for (auto _ : state) benchmark::DoNotOptimize(X.project(x));
}
BENCHMARK(BM_SimplexProjection)->Arg(2)->Arg(3)->Arg(64);

void BM_LowerSolve(benchmark::State& state) {
    ioc::DefaultInstanceOptions o;
    o.nodes = static_cast<int>(state.range(0));
    const ioc::ProblemSpec spec = ioc::make_default_problem(o);
    const ioc::LowerLevelSolver solver(spec);
    const ioc::Vec x{0.4, 0.6};
    for (auto _ : state) benchmark::DoNotOptimize(solver.solve(x, 1e-10));
}
BENCHMARK(BM_LowerSolve)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_RelaxedSolve(benchmark::State& state) {
    const ioc::ProblemSpec spec = ioc::make_default_problem();
    const double eps = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ioc::solve_relaxed(spec, eps));
}
BENCHMARK(BM_RelaxedSolve)->Arg(10)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
