// Serial reference vs OpenMP batch kernel on the same frames.
//
//   ./build/bench/dualink_bench --benchmark_counters_tabular=true

#include <benchmark/benchmark.h>
#include <omp.h>

#include "dualink/harness.hpp"
#include "dualink/monte_carlo.hpp"

using namespace dualink;

namespace {

LinkSimulation make_sim(Modulation m)
{
    ScenarioConfig cfg;
    cfg.scenario = Scenario::Custom;
    cfg.modulation = m;
    const auto p = effective_params(cfg);
    return LinkSimulation(p, cfg.code, channel_config(cfg, Link::Plc, 2.0), channel_config(cfg, Link::Wireless, 2.0),
                          cfg.receiver, cfg.knowledge, 7);
}

template <auto Kernel>
void run_batch(benchmark::State& state)
{
    const auto m = state.range(0) == 0 ? Modulation::Bpsk : Modulation::Dbpsk;
    const int batch = static_cast<int>(state.range(1));
    const int threads = static_cast<int>(state.range(2));
    const auto sim = make_sim(m);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(threads);

    LinkTrackers trackers(sim.receiver());
    long long first = 0;
    for (auto _ : state) {
        auto out = Kernel(sim, trackers, first, batch, CombiningScheme::Mrc);
        benchmark::DoNotOptimize(out.data());
        first += batch;
    }
    omp_set_num_threads(saved);
    state.SetItemsProcessed(state.iterations() * batch);
    state.counters["info_bits/s"] = benchmark::Counter(
        double(state.iterations()) * batch * double(sim.info_bits_per_frame()), benchmark::Counter::kIsRate);
    state.SetLabel(to_string(m));
}

void args(benchmark::internal::Benchmark* b, bool threaded)
{
    const int max_threads = omp_get_num_procs();
    for (int m : {0, 1})
        for (int batch : {8, 32}) {
            if (!threaded) {
                b->Args({m, batch, 1});
                continue;
            }
            for (int t = 1; t <= max_threads; t *= 2) b->Args({m, batch, t});
            if ((max_threads & (max_threads - 1)) != 0) b->Args({m, batch, max_threads});
        }
    b->ArgNames({"mod", "batch", "threads"})->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(run_batch<simulate_frames_serial>)->Name("serial")->Apply([](auto* b) { args(b, false); });
BENCHMARK(run_batch<simulate_frames_omp>)->Name("openmp")->Apply([](auto* b) { args(b, true); });

BENCHMARK_MAIN();
