#include <mnarp/sweep.hpp>
#include <mnarp/units.hpp>

#include <benchmark/benchmark.h>

using namespace mnarp;

namespace {

SweepSpec bench_spec()
{
    SweepSpec spec = preset("fig2");
    spec.areas_rad = linspace(2.0 * units::pi, 16.0 * units::pi, 8);
    spec.axis_values_meV = linspace(2.0, 5.0, 4);
    return spec;
}

std::size_t cells(const SweepSpec& spec)
{
    return spec.areas_rad.size() * spec.axis_values_meV.size() * spec.n_emitters;
}

void BM_SweepSerial(benchmark::State& state)
{
    const SweepSpec spec = bench_spec();
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_sweep_serial(spec).values.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * cells(spec)));
}

void BM_SweepOpenMP(benchmark::State& state)
{
    const SweepSpec spec = bench_spec();
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_sweep(spec, {}, workers).values.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * cells(spec)));
}

void BM_ColumnPulse(benchmark::State& state)
{
    const SweepSpec spec = bench_spec();
    for (auto _ : state) {
        benchmark::DoNotOptimize(column_pulse(spec, 0).envelope.data());
    }
}

void BM_SingleCell(benchmark::State& state)
{
    const SweepSpec spec = bench_spec();
    const TemporalPulse p = column_pulse(spec, 1);
    const double detuning = spec.layout(spec.axis_values_meV[1]).front();
    for (auto _ : state) {
        benchmark::DoNotOptimize(final_occupation(p, EmitterParams{detuning, 10.0 * units::pi}));
    }
}

} // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepOpenMP)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ColumnPulse)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SingleCell)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
