// OpenMP kernels against their serial references.
//
//   ./bench_kernels --benchmark_filter=Viterbi
//   OMP_NUM_THREADS=4 ./bench_kernels

#include <benchmark/benchmark.h>

#include "driftloc/ingest.hpp"
#include "driftloc/sim.hpp"

using namespace driftloc;

namespace {

GriddedField gyre_field(int scale) {
    SyntheticFieldSpec spec;
    spec.kind = SyntheticKind::double_gyre;
    return synthesize_field(spec, 20 * scale + 1, 28 * scale + 1);
}

template <bool Parallel>
void BM_CellMap(benchmark::State& state) {
    const auto data = gyre_field(static_cast<int>(state.range(0)));
    const auto dt = default_time_step(data.workspace, data.field);
    for (auto _ : state) {
        auto cm = Parallel ? build_cell_map(data.workspace, data.field, dt)
                           : build_cell_map_serial(data.workspace, data.field, dt);
        benchmark::DoNotOptimize(cm);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.workspace.free_count()));
}

template <bool Parallel>
void BM_Viterbi(benchmark::State& state) {
    const auto model = build_flow_model(gyre_field(static_cast<int>(state.range(0))), 0.9);
    const auto& w = model.data.workspace;
    const CellIndex start = w.cell_at({w.rows() / 4, w.cols() / 4});
    auto pi = initial_distribution(w, start, PriorMode::probabilistic);
    const auto sample = sample_trajectory(w, model.stochastic.mapping, pi, 100, std::uint64_t{7});
    const HmmModel hmm(model.stochastic.mapping, model.emissions, std::move(pi));
    for (auto _ : state) {
        auto decoded = Parallel ? viterbi(hmm, sample.observations) : viterbi_serial(hmm, sample.observations);
        benchmark::DoNotOptimize(decoded);
    }
}

template <bool Parallel>
void BM_Experiment(benchmark::State& state) {
    const auto model = build_flow_model(gyre_field(1), 0.9);
    ExperimentConfig cfg;
    cfg.synthetic = "double_gyre";
    cfg.steps = {50};
    cfg.runs = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto result = run_experiment(cfg, model, Parallel ? Execution::parallel : Execution::serial);
        benchmark::DoNotOptimize(result);
    }
}

}  // namespace

BENCHMARK(BM_CellMap<false>)->Name("CellMap/serial")->Arg(1)->Arg(4)->Arg(16);
BENCHMARK(BM_CellMap<true>)->Name("CellMap/omp")->Arg(1)->Arg(4)->Arg(16);
BENCHMARK(BM_Viterbi<false>)->Name("Viterbi/serial")->Arg(1)->Arg(4);
BENCHMARK(BM_Viterbi<true>)->Name("Viterbi/omp")->Arg(1)->Arg(4);
BENCHMARK(BM_Experiment<false>)->Name("Experiment/serial")->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Experiment<true>)->Name("Experiment/omp")->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
