#include "gibbslab/log_math.hpp"

#include <algorithm>
#include <cmath>

namespace gibbslab {

namespace {

// Width, in natural-log units, of a single scaling block. Two blocks
// multiplied together span at most twice this, well inside the exponent
// range of a double.
constexpr double kBlockRange = 300.0;

struct ScaledBlock {
  std::size_t start = 0;
  double shift = 0.0;
  std::vector<double> values;
};

std::vector<ScaledBlock> scaled_blocks(std::span<const double> v) {
  std::vector<ScaledBlock> blocks;
  std::size_t i = 0;
  const std::size_t n = v.size();
  while (i < n) {
    while (i < n && v[i] == kLogZero) ++i;
    if (i == n) break;
    const std::size_t start = i;
    double lo = v[i];
    double hi = v[i];
    std::size_t end = i + 1;
    while (end < n) {
      if (v[end] != kLogZero) {
        const double nlo = std::min(lo, v[end]);
        const double nhi = std::max(hi, v[end]);
        if (nhi - nlo > kBlockRange) break;
        lo = nlo;
        hi = nhi;
      }
      ++end;
    }
    // Drop trailing zeros so the block ends on a finite entry.
    std::size_t last = end;
    while (last > start && v[last - 1] == kLogZero) --last;
    ScaledBlock block;
    block.start = start;
    block.shift = hi;
    block.values.resize(last - start);
    for (std::size_t j = start; j < last; ++j) {
      block.values[j - start] = v[j] == kLogZero ? 0.0 : std::exp(v[j] - hi);
    }
    blocks.push_back(std::move(block));
    i = end;
  }
  return blocks;
}

}  // namespace

double log_add_exp(double a, double b) noexcept {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double log_sum_exp(std::span<const double> values) noexcept {
  double hi = kLogZero;
  for (double v : values) hi = std::max(hi, v);
  if (hi == kLogZero) return kLogZero;
  if (std::isinf(hi)) return hi;
  double acc = 0.0;
  for (double v : values) {
    if (v != kLogZero) acc += std::exp(v - hi);
  }
  return hi + std::log(acc);
}

std::vector<double> log_convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, kLogZero);
  const auto blocks_a = scaled_blocks(a);
  const auto blocks_b = scaled_blocks(b);
  std::vector<double> scratch;
  for (const auto& ba : blocks_a) {
    for (const auto& bb : blocks_b) {
      const std::size_t la = ba.values.size();
      const std::size_t lb = bb.values.size();
      scratch.assign(la + lb - 1, 0.0);
      const double* pb = bb.values.data();
      for (std::size_t i = 0; i < la; ++i) {
        const double va = ba.values[i];
        if (va == 0.0) continue;
        double* dst = scratch.data() + i;
        for (std::size_t j = 0; j < lb; ++j) dst[j] += va * pb[j];
      }
      const double shift = ba.shift + bb.shift;
      const std::size_t offset = ba.start + bb.start;
      for (std::size_t t = 0; t < scratch.size(); ++t) {
        if (scratch[t] > 0.0) {
          out[offset + t] = log_add_exp(out[offset + t], std::log(scratch[t]) + shift);
        }
      }
    }
  }
  return out;
}

std::vector<double> log_cumsum(std::span<const double> values) {
  std::vector<double> out(values.size());
  double acc = kLogZero;
  for (std::size_t k = 0; k < values.size(); ++k) {
    acc = log_add_exp(acc, values[k]);
    out[k] = acc;
  }
  return out;
}

std::vector<double> log_cumsum_reverse(std::span<const double> values) {
  std::vector<double> out(values.size());
  double acc = kLogZero;
  for (std::size_t k = values.size(); k-- > 0;) {
    acc = log_add_exp(acc, values[k]);
    out[k] = acc;
  }
  return out;
}

}  // namespace gibbslab
