#include <benchmark/benchmark.h>

#include "gibbslab/chains.hpp"

using namespace gibbslab;

namespace {

void BM_CoupledZr(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<BaseSpec> specs{BaseSpec::geometric(0.5)};
  const Family family = make_family(specs, kDefaultTruncEps, 1.7);
  const ZeroRangeSpec spec = zero_range_from_family(family, n);
  Configuration x(n, 0), xp(n, 0);
  x[0] = static_cast<int>(n);
  xp[0] = static_cast<int>(2 * n);
  SimulationOptions opt;
  opt.t_end = 1e9;
  opt.event_cap = 20000;
  opt.record_trace = false;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    opt.seed = seed++;
    benchmark::DoNotOptimize(coupled_zr_simulate(spec, x, xp, opt));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(opt.event_cap));
}
BENCHMARK(BM_CoupledZr)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_CoupledBd(benchmark::State& state) {
  const std::vector<BaseSpec> specs{BaseSpec::geometric(0.5)};
  const Family family = make_family(specs, kDefaultTruncEps, 1.7);
  const CoupledBDSpec spec{family.member(0), 1.1, 1.6, 0, 40};
  SimulationOptions opt;
  opt.t_end = 1e9;
  opt.event_cap = 20000;
  opt.record_trace = false;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    opt.seed = seed++;
    benchmark::DoNotOptimize(coupled_bd_simulate(spec, BDPair{0, 0}, opt));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(opt.event_cap));
}
BENCHMARK(BM_CoupledBd)->Unit(benchmark::kMillisecond);

}  // namespace
