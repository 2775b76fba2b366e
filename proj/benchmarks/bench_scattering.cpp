#include <benchmark/benchmark.h>

#include "csmpd/fixtures.hpp"
#include "csmpd/scattering.hpp"

namespace {

void bm_s21_point(benchmark::State& state) {
    const auto dev = csmpd::fixture_device("reference");
    double delta = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(csmpd::s21(dev.chain, delta));
        delta += 1.0;  // defeat value caching without changing the physics
    }
}
BENCHMARK(bm_s21_point);

void bm_response_grid(benchmark::State& state) {
    const auto dev = csmpd::fixture_device("reference");
    const double span =
        5.0 * (dev.chain.modes.front().kappa_total() +
               dev.chain.modes.back().kappa_total());
    const auto points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            csmpd::compute_scattering(dev.chain, -span, span, points));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_response_grid)->Arg(256)->Arg(1024)->Arg(4096)->Complexity();

void bm_numeric_fwhm(benchmark::State& state) {
    const auto dev = csmpd::fixture_device("reference");
    for (auto _ : state)
        benchmark::DoNotOptimize(
            csmpd::bandwidth(dev.chain, csmpd::BandwidthMethod::numeric_fwhm));
}
BENCHMARK(bm_numeric_fwhm);

void bm_pulse_filtered(benchmark::State& state) {
    const auto dev = csmpd::fixture_device("reference");
    for (auto _ : state)
        benchmark::DoNotOptimize(
            csmpd::pulse_filtered_transmissions(dev.chain, dev.cycle.t_d));
}
BENCHMARK(bm_pulse_filtered);

} // namespace

BENCHMARK_MAIN();
