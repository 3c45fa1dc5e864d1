#include <benchmark/benchmark.h>

#include <tspq/ctmc.hpp>
#include <tspq/metrics.hpp>
#include <tspq/sim.hpp>

namespace {

tspq::SystemParams table_params(double lambda_rt) {
    return {60, 15, lambda_rt, 8.0, 30.0, 25.0};
}

void BM_BuildGenerator(benchmark::State& state) {
    const tspq::SystemParams params = table_params(30.0);
    for (auto _ : state) {
        auto q = tspq::build_generator(params, tspq::SchemeKind::EbTsp);
        benchmark::DoNotOptimize(q);
    }
}
BENCHMARK(BM_BuildGenerator);

void BM_SolvePoint(benchmark::State& state) {
    const tspq::SystemParams params =
        table_params(static_cast<double>(state.range(0)));
    for (auto _ : state) {
        auto dist = tspq::solve_model(params, tspq::SchemeKind::EbTsp);
        benchmark::DoNotOptimize(dist);
    }
}
BENCHMARK(BM_SolvePoint)->Arg(10)->Arg(30)->Arg(50);

void BM_AnalyticQos(benchmark::State& state) {
    const tspq::SystemParams params = table_params(30.0);
    const auto dist = tspq::solve_model(params, tspq::SchemeKind::EbTsp);
    for (auto _ : state) {
        auto qos = tspq::analytic_qos(dist, params, tspq::SchemeKind::EbTsp);
        benchmark::DoNotOptimize(qos);
    }
}
BENCHMARK(BM_AnalyticQos);

void BM_SimulationEvents(benchmark::State& state) {
    tspq::SimConfig config;
    config.params = table_params(30.0);
    config.seed = 42;
    config.stop = tspq::StopRule::events(static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) {
        auto counters = tspq::run_simulation(config);
        benchmark::DoNotOptimize(counters);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulationEvents)->Arg(100000)->Arg(1000000);

} // namespace

BENCHMARK_MAIN();
