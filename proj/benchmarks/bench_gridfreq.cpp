#include <benchmark/benchmark.h>

#include <filesystem>

#include "gridfreq/config_io.hpp"
#include "gridfreq/dynamics.hpp"
#include "gridfreq/experiment.hpp"

using namespace gridfreq;

namespace {

const std::filesystem::path kScenarios = GRIDFREQ_BENCH_SCENARIO_DIR;

ScenarioFile scenario(const char* name)
{
    return load_scenario_file(kScenarios / name);
}

void BM_SimulateBaseline(benchmark::State& state)
{
    const auto config = scenario("ei80.cfg").config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(config));
    }
}
BENCHMARK(BM_SimulateBaseline)->Unit(benchmark::kMillisecond);

void BM_SimulateAllTactics(benchmark::State& state)
{
    const auto file = scenario("ei80.cfg");
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_compare(file.config, file.tactics, 1));
    }
}
BENCHMARK(BM_SimulateAllTactics)->Unit(benchmark::kMillisecond);

// Multimachine run with n copies of the ERCOT fleet coupled to each other.
void BM_Multimachine(benchmark::State& state)
{
    auto config = scenario("ercot40.cfg").config;
    const auto base = config.fleet_template;
    config.fleet_template.clear();
    for (int copy = 0; copy < state.range(0); ++copy) {
        for (auto g : base) {
            g.name += "_" + std::to_string(copy);
            g.capacity_mw /= static_cast<double>(state.range(0));
            g.headroom_mw /= static_cast<double>(state.range(0));
            config.fleet_template.push_back(g);
        }
    }
    const auto n = config.fleet_template.size();
    config.sim.network_mode = NetworkMode::multimachine;
    // Total synchronizing coefficient per group held at 2 pu regardless of n.
    config.sim.coupling.assign(n, std::vector<double>(n, 2.0 / static_cast<double>(n - 1)));
    for (std::size_t i = 0; i < n; ++i) {
        config.sim.coupling[i][i] = 0.0;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(config));
    }
    state.SetComplexityN(static_cast<int64_t>(n));
}
BENCHMARK(BM_Multimachine)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->Complexity();

void BM_DurationSweep(benchmark::State& state)
{
    const auto spec = load_sweep_spec(kScenarios / "ei80_supercap_duration.sweep");
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_sweep(spec, static_cast<unsigned>(state.range(0))));
    }
}
BENCHMARK(BM_DurationSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
