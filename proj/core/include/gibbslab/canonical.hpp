#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gibbslab/dominance.hpp"
#include "gibbslab/interval.hpp"
#include "gibbslab/joint_table.hpp"
#include "gibbslab/pmf.hpp"

namespace gibbslab {

// P(X_i = x | S_n = k) for the base (untilted) family; i is 0-based.
Pmf canonical_marginal(const Family& family, std::size_t i, std::size_t n, long k);

// mu_n(. | k) as a dense table. Coordinate i ranges over 0..min(max_i, k),
// which holds all of the canonical mass.
JointTable canonical_joint(const Family& family, std::size_t n, long k,
                           std::size_t cap = kDefaultConfigurationCap);

// P(X^lambda_n = . | S^lambda_n in I), built as the mixture
// sum_{k in I} pi^lambda_n(k | I) mu_n(. | k) and checked entrywise against the
// direct product-and-condition computation. A mismatch above 1e-11 raises an
// internal error. Coordinates range over the full member supports.
JointTable mixture_conditional(const Family& family, double lambda, std::size_t n,
                               const Interval& interval,
                               std::size_t cap = kDefaultConfigurationCap);

// Direct route only: product of tilted members restricted to the event.
JointTable direct_conditional(const Family& family, double lambda, std::size_t n,
                              const Interval& interval,
                              std::size_t cap = kDefaultConfigurationCap);

struct EfronPair {
  long k = 0;
  bool holds = false;
  double flow = 0.0;
  // Only the per-coordinate marginal orders were checked (dense cap exceeded).
  bool marginal_only = false;
  std::optional<UpSetCertificate> certificate;
};

struct EfronReport {
  std::size_t n = 0;
  long k_max = 0;
  bool all_log_concave = false;
  std::vector<LogConcavityReport> member_reports;  // first n members
  std::vector<EfronPair> pairs;
  bool all_hold = false;
  bool degraded = false;
};

// Checks mu_n(.|k) ≺ mu_n(.|k+1) for k = 0..k_max-1. Log-concavity is
// recorded, not enforced: the check still runs for other families.
EfronReport efron_check(const Family& family, std::size_t n, long k_max,
                        std::size_t cap = kDefaultConfigurationCap);

enum class OrderingMode { kBothAbove, kBothBelow, kBelowAbove };

// Orders P(X^lambda | S^lambda in A) against P(X^lambda' | S^lambda' in B):
//   kBothAbove:  A = B = (R, inf)
//   kBothBelow:  A = B = (-inf, R)
//   kBelowAbove: A = (-inf, R), B = (R, inf)
DominanceResult tilt_ordering_check(const Family& family, double lambda, double lambda2,
                                   std::size_t n, double r, OrderingMode mode,
                                   std::size_t cap = kDefaultConfigurationCap);

// g_i(z) = nu_i(z-1)/nu_i(z) on [0, max_i], zero at z = 0.
std::vector<double> jump_rates_from_pmf(const Pmf& pmf);

}  // namespace gibbslab
