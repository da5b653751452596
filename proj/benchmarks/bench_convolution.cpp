#include <vector>

#include <benchmark/benchmark.h>

#include "gibbslab/log_math.hpp"
#include "gibbslab/pmf.hpp"
#include "gibbslab/sumstats.hpp"

using namespace gibbslab;

namespace {

std::vector<double> ramp(std::size_t len) {
  std::vector<double> v(len);
  for (std::size_t i = 0; i < len; ++i) v[i] = -0.01 * static_cast<double>(i * i % 97);
  return v;
}

void BM_LogConvolve(benchmark::State& state) {
  const auto a = ramp(static_cast<std::size_t>(state.range(0)));
  const auto b = ramp(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(log_convolve(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LogConvolve)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_SumLaw(benchmark::State& state) {
  const std::vector<BaseSpec> specs{BaseSpec::geometric(0.5), BaseSpec::binomial(4, 0.3)};
  const Family family = make_family(specs, kDefaultTruncEps, 1.7);
  const auto order = state.range(1) == 0 ? ConvolutionOrder::kSequential : ConvolutionOrder::kBalanced;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sum_law(family, 1.4, static_cast<std::size_t>(state.range(0)), order));
  }
}
BENCHMARK(BM_SumLaw)->ArgsProduct({{50, 200, 800}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace
