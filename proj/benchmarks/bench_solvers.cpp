#include <benchmark/benchmark.h>

#include "bep/experiment.hpp"

using namespace bep;

namespace {

// Full preset run without residual sampling; the arg is the preset index.
void BM_PresetRun(benchmark::State& state) {
    const auto name = preset_names()[static_cast<std::size_t>(state.range(0))];
    auto cfg = preset_config(name);
    cfg.diagnostics.verify_residual = false;
    const auto problem = resolve_problem(cfg).problem;
    RunOptions options;
    options.inner = cfg.inner;
    options.verify_residual = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run(problem, cfg.solver, cfg.schedule, cfg.x0, cfg.x1, cfg.stopping, options));
    }
    state.SetLabel(name);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.stopping.max_iterations));
}
BENCHMARK(BM_PresetRun)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_VerifiedRun(benchmark::State& state) {
    auto cfg = preset_config("section5");
    cfg.diagnostics.vi_samples = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg, false));
}
BENCHMARK(BM_VerifiedRun)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SeriesCheck(benchmark::State& state) {
    const auto cfg = preset_config("hmp-distance");
    const auto resolved = resolve_problem(cfg);
    const auto& psi = resolved.problem.f.as<DifferenceBifunction>().h;
    const auto& target = psi.as<HalfSquaredDistancePiece>().target;
    const GapEvaluator gap(DifferenceGap{psi, target, resolved.problem.K, resolved.series->p});
    for (auto _ : state) {
        benchmark::DoNotOptimize(series_check(gap, cfg.schedule, static_cast<std::size_t>(state.range(0))));
    }
}
BENCHMARK(BM_SeriesCheck)->Arg(1000)->Arg(10000);

}  // namespace
