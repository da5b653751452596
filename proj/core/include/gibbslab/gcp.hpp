#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gibbslab/dominance.hpp"
#include "gibbslab/interval.hpp"
#include "gibbslab/joint_table.hpp"
#include "gibbslab/pmf.hpp"
#include "gibbslab/sumstats.hpp"

namespace gibbslab {

// kAbove: S > R, kBelow: S < R, kEqualFloor: S = floor(R).
enum class ConditionMode { kAbove, kBelow, kEqualFloor };

std::string to_string(ConditionMode mode);
ConditionMode parse_condition_mode(const std::string& text);

// Thresholds within 1e-9 (relative) of an integer are taken as that integer.
Interval event_interval(ConditionMode mode, double r);

struct ConditionedLaw {
  std::size_t ell = 0;
  std::size_t n = 0;
  ConditionMode mode = ConditionMode::kAbove;
  double lambda = 1.0;
  double threshold = 0.0;
  Interval event;
  JointTable joint;
  double log_event_mass = 0.0;
  double event_mass = 0.0;
};

// Law of the first ell coordinates of X^lambda given S^lambda_n in the event,
// from the tilted prefix product and the law of the remaining sum.
ConditionedLaw conditioned_law(const Family& family, double lambda, std::size_t ell,
                               std::size_t n, ConditionMode mode, double r,
                               std::size_t cap = kDefaultConfigurationCap);

// Same, for an arbitrary interval event.
ConditionedLaw conditioned_law_on(const Family& family, double lambda, std::size_t ell,
                                  std::size_t n, const Interval& event,
                                  std::size_t cap = kDefaultConfigurationCap);

// Half the L1 distance. Tables must share dims; pmfs are zero-padded.
double tv_distance(const JointTable& p, const JointTable& q);
double tv_distance(const Pmf& p, const Pmf& q);

// Product of the first ell members tilted by lambda, on the full member boxes.
JointTable tilted_product(const Family& family, double lambda, std::size_t ell,
                          std::size_t cap = kDefaultConfigurationCap);

struct GcpOptions {
  bool allow_hypothesis_override = false;
  double conditioning_lambda = 1.0;
  // Step in t = log lambda for the gap diagnostic; 0 picks
  // min(0.25, log(cap / lambda*) / 2).
  double diagnostic_eps = 0.0;
  double diagnostic_threshold = 1.0;
  std::size_t cap = kDefaultConfigurationCap;
};

struct ConvergenceRow {
  std::size_t n = 0;
  double r_star = 0.0;
  double event_mass = 0.0;
  double tv = 0.0;
};

struct ConvergenceTable {
  double lambda_star = 0.0;
  std::size_t ell = 0;
  ConditionMode mode = ConditionMode::kAbove;
  double conditioning_lambda = 1.0;
  bool hypothesis_override = false;
  std::vector<ConvergenceRow> rows;
  std::optional<ConditionTrend> diagnostic;
};

// TV between the conditioned law of the first ell coordinates (event built
// from R*_n and the mode) and the lambda*-tilted product, for each n.
ConvergenceTable gcp_experiment(const Family& family, double lambda_star, std::size_t ell,
                                std::span<const std::size_t> n_list, ConditionMode mode,
                                const GcpOptions& options = {});

struct BracketCheck {
  double lambda = 0.0;
  ConditionMode event = ConditionMode::kAbove;
  bool holds = false;
  double flow = 0.0;
  double tv_to_target = 0.0;
  std::optional<UpSetCertificate> certificate;
};

struct SandwichReport {
  ConditionMode mode = ConditionMode::kAbove;
  double lambda_star = 0.0;
  std::size_t ell = 0;
  std::size_t n = 0;
  double r_star = 0.0;
  double tv_base = 0.0;
  // lambda_lo law conditioned below R*, dominated by the base law.
  BracketCheck lower;
  // lambda_hi law conditioned above R*, dominating the base law.
  BracketCheck upper;
  bool holds = false;
};

// Base law given the mode event at R*_n, bracketed by
//   P(X^lo | S^lo < R*) ≺ base ≺ P(X^hi | S^hi > R*).
// mode above: 1 < lo < lambda* < hi <= cap; mode below: 0 < lo < lambda* < hi < 1.
SandwichReport sandwich_check(const Family& family, double lambda_star, double lambda_lo,
                              double lambda_hi, std::size_t ell, std::size_t n, ConditionMode mode,
                              std::size_t cap = kDefaultConfigurationCap);

struct EventOrderingReport {
  double r = 0.0;
  DominanceResult below_vs_floor;  // S <= R  vs  S = floor(R)
  DominanceResult floor_vs_above;  // S = floor(R)  vs  S > R
  bool holds = false;
};

// P(X_ell | S_n <= R) ≺ P(X_ell | S_n = floor R) ≺ P(X_ell | S_n > R) for base variables.
EventOrderingReport event_ordering_check(const Family& family, std::size_t ell, std::size_t n,
                                         double r, std::size_t cap = kDefaultConfigurationCap);

}  // namespace gibbslab
