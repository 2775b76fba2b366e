#include <benchmark/benchmark.h>

#include "csmpd/dynamics.hpp"
#include "csmpd/fixtures.hpp"
#include "csmpd/montecarlo.hpp"

namespace {

csmpd::ChainSpec closed_buffer_chain(const char* fixture) {
    auto chain = csmpd::fixture_device(fixture).chain;
    chain.modes.front().kappa_ext = 0.0;
    chain.modes.front().kappa_int = 0.0;
    return chain;
}

void bm_master_equation(benchmark::State& state) {
    const auto chain = closed_buffer_chain(
        state.range(0) == 1 ? "lossless-n1" : "lossless-n2");
    const auto initial = csmpd::photon_in_buffer(chain.n_stages());
    const double t_max = 2e-5;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            csmpd::evolve_master_equation(chain, initial, t_max, t_max / 400.0));
}
BENCHMARK(bm_master_equation)->Arg(1)->Arg(2);

void bm_linear_model(benchmark::State& state) {
    const auto chain = closed_buffer_chain("lossless-n2");
    std::vector<csmpd::Complex> initial(chain.modes.size());
    initial[0] = 1.0;
    const double t_max = 2e-5;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            csmpd::evolve_linear_model(chain, initial, t_max, t_max / 400.0));
}
BENCHMARK(bm_linear_model);

void bm_simulate_cycles(benchmark::State& state) {
    csmpd::CycleModel model;
    model.stages = {{0.63, 0.63}, {0.61, 0.66}};
    model.intrinsic_flip = {2.6e-3, 3.1e-3};
    model.t_d = 13e-6;
    model.t_cycle = 16.128e-6;
    model.thermal_rate = 0.02;
    const double duration = static_cast<double>(state.range(0)) * model.t_cycle;
    for (auto _ : state)
        benchmark::DoNotOptimize(csmpd::simulate(model, 200.0, duration, 7));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_simulate_cycles)->Arg(10000)->Arg(100000);

} // namespace
