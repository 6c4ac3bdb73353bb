#include <benchmark/benchmark.h>

#include "bep/experiment.hpp"

using namespace bep;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

void BM_ResolveTwoQuadratic(benchmark::State& state) {
    const auto problem = resolve_problem(preset_config("section5")).problem;
    const ResolventProblem prob{problem.f, problem.g, problem.K, 0.5, 8.0, v2(0.0, 0.5)};
    for (auto _ : state) benchmark::DoNotOptimize(resolve_difference(prob));
}
BENCHMARK(BM_ResolveTwoQuadratic);

void BM_ResolveGradient(benchmark::State& state) {
    const auto cfg = preset_config("hmp-distance");
    const auto problem = resolve_problem(cfg).problem;
    const ResolventProblem prob{problem.f, problem.g, problem.K, 0.5, 8.0, v2(0.0, 0.0)};
    for (auto _ : state) benchmark::DoNotOptimize(resolve_gradient(prob, cfg.inner));
}
BENCHMARK(BM_ResolveGradient);

void BM_ResolveSaddle(benchmark::State& state) {
    const auto cfg = preset_config("saddle-example");
    const auto problem = resolve_problem(cfg).problem;
    const ResolventProblem prob{problem.f, problem.g, problem.K, 0.5, 8.0, v2(0.5, 0.5)};
    for (auto _ : state) benchmark::DoNotOptimize(resolve_saddle(prob, cfg.inner));
}
BENCHMARK(BM_ResolveSaddle);

void BM_ProjectedProx(benchmark::State& state) {
    const Matrix Q = (Matrix(2, 2) << 1.0, 0.0, 0.0, 100.0).finished();
    const ProxRequest req{ConvexPiece::quadratic(Q, v2(1, 1), 0.0), 1.0, v2(5, -3),
                          ConstraintSet::box(v2(0, -10), v2(10, 10))};
    for (auto _ : state) benchmark::DoNotOptimize(prox(req));
}
BENCHMARK(BM_ProjectedProx);

}  // namespace
