#pragma once

#include <limits>
#include <span>
#include <vector>

namespace gibbslab {

// Sentinel for log(0).
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) noexcept;
double log_sum_exp(std::span<const double> values) noexcept;

// Log-domain convolution: out[k] = log sum_j exp(a[j] + b[k - j]).
//
// Both inputs are split into blocks whose dynamic range fits comfortably in a
// double, each block pair is convolved in the direct domain, and the partial
// results are merged with log-add-exp. The result keeps full relative
// precision for entries hundreds of orders of magnitude below the maximum.
std::vector<double> log_convolve(std::span<const double> a, std::span<const double> b);

// Cumulative log-sums from the left: out[k] = log sum_{j<=k} exp(v[j]).
std::vector<double> log_cumsum(std::span<const double> values);

// Cumulative log-sums from the right: out[k] = log sum_{j>=k} exp(v[j]).
std::vector<double> log_cumsum_reverse(std::span<const double> values);

}  // namespace gibbslab
