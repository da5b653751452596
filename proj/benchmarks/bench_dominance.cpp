#include <benchmark/benchmark.h>

#include "gibbslab/dominance.hpp"
#include "gibbslab/gcp.hpp"

using namespace gibbslab;

namespace {

void BM_Dominance(benchmark::State& state) {
  const std::vector<BaseSpec> specs{BaseSpec::binomial(static_cast<int>(state.range(0)), 0.4)};
  const Family family = make_family(specs);
  const auto ell = static_cast<std::size_t>(state.range(1));
  const JointTable lower = tilted_product(family, 1.0, ell);
  const JointTable upper = tilted_product(family, 1.5, ell);
  const auto network = static_cast<DominanceNetwork>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(stochastic_dominance(lower, upper, network));
  state.counters["configs"] = static_cast<double>(lower.size());
}
BENCHMARK(BM_Dominance)
    ->ArgsProduct({{3, 6}, {2, 3}, {static_cast<long>(DominanceNetwork::kBipartite),
                                    static_cast<long>(DominanceNetwork::kLattice)}})
    ->Unit(benchmark::kMillisecond);

}  // namespace
