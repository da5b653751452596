#include "gibbslab/gcp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gibbslab/error.hpp"
#include "gibbslab/log_math.hpp"
#include "gibbslab/parallel.hpp"

namespace gibbslab {

namespace {

constexpr double kIntegralSnap = 1e-9;

[[noreturn]] void bad_parameter(const std::string& msg) {
  throw Error(ErrorKind::kInvalidParameter, msg);
}

std::vector<int> prefix_dims(const Family& family, std::size_t ell) {
  std::vector<int> dims(ell);
  for (std::size_t c = 0; c < ell; ++c) dims[c] = family.member(c).support_max() + 1;
  return dims;
}

// log P(T in [lo, hi]) for the tail sum T, given its log CDF and log CCDF.
class TailMass {
 public:
  explicit TailMass(const SumLaw& tail)
      : lp_(tail.log_probs), cdf_(log_cumsum(lp_)), ccdf_(log_cumsum_reverse(lp_)) {}

  double operator()(const Interval& e) const {
    const auto k_max = static_cast<std::int64_t>(lp_.size()) - 1;
    const std::int64_t lo = e.bounded_below() ? std::max<std::int64_t>(e.lo(), 0) : 0;
    const std::int64_t hi = e.bounded_above() ? std::min(e.hi(), k_max) : k_max;
    if (lo > hi) return kLogZero;
    if (lo == 0) return cdf_[static_cast<std::size_t>(hi)];
    if (hi == k_max) return ccdf_[static_cast<std::size_t>(lo)];
    if (lo == hi) return lp_[static_cast<std::size_t>(lo)];
    return log_sum_exp(std::span<const double>(lp_).subspan(static_cast<std::size_t>(lo),
                                                           static_cast<std::size_t>(hi - lo + 1)));
  }

 private:
  std::vector<double> lp_;
  std::vector<double> cdf_;
  std::vector<double> ccdf_;
};

std::size_t resolve_ell(std::size_t ell, std::size_t n) {
  if (ell == 0) bad_parameter("ell must be at least 1");
  if (ell > n) bad_parameter("ell must not exceed n");
  return ell;
}

double auto_eps(const Family& family, double lambda_star) {
  const double room = std::log(family.lambda_cap() / lambda_star);
  if (!std::isfinite(room)) return 0.25;
  return std::min(0.25, 0.5 * room);
}

void check_hypothesis(const Family& family, double lambda_star, ConditionMode mode) {
  if (!(lambda_star > 0.0)) bad_parameter("lambda* must be positive");
  if (lambda_star > family.lambda_cap() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "lambda* = " << lambda_star << " exceeds the family cap " << family.lambda_cap();
    bad_parameter(os.str());
  }
  if (mode == ConditionMode::kAbove && !(lambda_star > 1.0)) {
    bad_parameter("mode above needs lambda* > 1 (the event S > R* must be atypical from above)");
  }
  if (mode == ConditionMode::kBelow && !(lambda_star < 1.0)) {
    bad_parameter("mode below needs lambda* < 1 (the event S < R* must be atypical from below)");
  }
}

}  // namespace

std::string to_string(ConditionMode mode) {
  switch (mode) {
    case ConditionMode::kAbove:
      return "above";
    case ConditionMode::kBelow:
      return "below";
    case ConditionMode::kEqualFloor:
      return "equal-floor";
  }
  return "above";
}

ConditionMode parse_condition_mode(const std::string& text) {
  if (text == "above") return ConditionMode::kAbove;
  if (text == "below") return ConditionMode::kBelow;
  if (text == "equal-floor" || text == "equal") return ConditionMode::kEqualFloor;
  bad_parameter("unknown mode '" + text + "' (expected above, below or equal-floor)");
}

Interval event_interval(ConditionMode mode, double r) {
  // R*_n computed in floating point; an integral value must not flip sides.
  if (std::isfinite(r)) {
    const double nearest = std::round(r);
    if (std::abs(r - nearest) <= kIntegralSnap * std::max(1.0, std::abs(r))) r = nearest;
  }
  switch (mode) {
    case ConditionMode::kAbove:
      return Interval::above(r);
    case ConditionMode::kBelow:
      return Interval::below(r);
    case ConditionMode::kEqualFloor:
      if (!std::isfinite(r)) bad_parameter("equal-floor needs a finite threshold");
      return Interval::point(static_cast<std::int64_t>(std::floor(r)));
  }
  return Interval::all();
}

ConditionedLaw conditioned_law_on(const Family& family, double lambda, std::size_t ell,
                                  std::size_t n, const Interval& event, std::size_t cap) {
  resolve_ell(ell, n);
  std::vector<Pmf> prefix;
  prefix.reserve(ell);
  for (std::size_t c = 0; c < ell; ++c) prefix.push_back(tilt(family.member(c), lambda));
  const TailMass tail_mass(sum_law_range(family, lambda, ell, n));

  std::vector<int> dims = prefix_dims(family, ell);
  std::vector<double> lw(JointTable::checked_size(dims, cap), kLogZero);
  for_each_configuration(dims, [&](std::size_t flat, const Configuration& x) {
    double acc = 0.0;
    std::int64_t s = 0;
    for (std::size_t c = 0; c < ell; ++c) {
      const double v = prefix[c].log_prob(x[c]);
      if (v == kLogZero) return;
      acc += v;
      s += x[c];
    }
    const double rest = tail_mass(event.shifted_down(s));
    if (rest != kLogZero) lw[flat] = acc + rest;
  });

  ConditionedLaw law;
  law.ell = ell;
  law.n = n;
  law.lambda = lambda;
  law.event = event;
  law.log_event_mass = log_sum_exp(lw);
  if (law.log_event_mass == kLogZero) throw EmptyConditionError(event, 0.0);
  law.event_mass = std::exp(law.log_event_mass);
  law.joint = JointTable(std::move(dims), std::move(lw));
  law.joint.normalize();
  return law;
}

ConditionedLaw conditioned_law(const Family& family, double lambda, std::size_t ell,
                               std::size_t n, ConditionMode mode, double r, std::size_t cap) {
  ConditionedLaw law = conditioned_law_on(family, lambda, ell, n, event_interval(mode, r), cap);
  law.mode = mode;
  law.threshold = r;
  return law;
}

double tv_distance(const JointTable& p, const JointTable& q) {
  if (!std::equal(p.dims().begin(), p.dims().end(), q.dims().begin(), q.dims().end())) {
    throw Error(ErrorKind::kInvalidInput, "tv_distance: tables have different shapes");
  }
  double acc = 0.0;
  for (std::size_t f = 0; f < p.size(); ++f) acc += std::abs(p.prob(f) - q.prob(f));
  return std::min(1.0, 0.5 * acc);
}

double tv_distance(const Pmf& p, const Pmf& q) {
  const int top = std::max(p.support_max(), q.support_max());
  double acc = 0.0;
  for (int x = 0; x <= top; ++x) acc += std::abs(p.prob(x) - q.prob(x));
  return std::min(1.0, 0.5 * acc);
}

JointTable tilted_product(const Family& family, double lambda, std::size_t ell, std::size_t cap) {
  if (ell == 0) bad_parameter("ell must be at least 1");
  std::vector<Pmf> members;
  members.reserve(ell);
  for (std::size_t c = 0; c < ell; ++c) members.push_back(tilt(family.member(c), lambda));
  return product_table(members, cap);
}

ConvergenceTable gcp_experiment(const Family& family, double lambda_star, std::size_t ell,
                                std::span<const std::size_t> n_list, ConditionMode mode,
                                const GcpOptions& options) {
  if (n_list.empty()) bad_parameter("n list is empty");
  if (!options.allow_hypothesis_override) {
    check_hypothesis(family, lambda_star, mode);
  } else if (!(lambda_star > 0.0)) {
    bad_parameter("lambda* must be positive");
  }
  for (std::size_t n : n_list) resolve_ell(ell, n);

  ConvergenceTable table;
  table.lambda_star = lambda_star;
  table.ell = ell;
  table.mode = mode;
  table.conditioning_lambda = options.conditioning_lambda;
  table.hypothesis_override = options.allow_hypothesis_override;

  const JointTable target = tilted_product(family, lambda_star, ell, options.cap);
  table.rows.resize(n_list.size());
  parallel_for(n_list.size(), [&](std::size_t idx) {
    const std::size_t n = n_list[idx];
    ConvergenceRow row;
    row.n = n;
    row.r_star = r_star(family, lambda_star, n);
    const ConditionedLaw law =
        conditioned_law(family, options.conditioning_lambda, ell, n, mode, row.r_star, options.cap);
    row.event_mass = law.event_mass;
    row.tv = tv_distance(law.joint, target);
    table.rows[idx] = row;
  });

  std::vector<std::size_t> sorted(n_list.begin(), n_list.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const double eps = options.diagnostic_eps > 0.0 ? options.diagnostic_eps
                                                  : auto_eps(family, lambda_star);
  if (lambda_star * std::exp(eps) <= family.lambda_cap() * (1.0 + 1e-12)) {
    table.diagnostic = condition_check(family, lambda_star, eps, sorted,
                                       options.diagnostic_threshold);
  }
  return table;
}

SandwichReport sandwich_check(const Family& family, double lambda_star, double lambda_lo,
                              double lambda_hi, std::size_t ell, std::size_t n, ConditionMode mode,
                              std::size_t cap) {
  if (!(lambda_lo < lambda_star && lambda_star < lambda_hi)) {
    bad_parameter("sandwich needs lambda_lo < lambda* < lambda_hi strictly");
  }
  switch (mode) {
    case ConditionMode::kAbove:
      if (!(lambda_lo > 1.0)) bad_parameter("mode above needs 1 < lambda_lo");
      if (lambda_hi > family.lambda_cap() * (1.0 + 1e-12)) {
        bad_parameter("lambda_hi exceeds the family cap");
      }
      break;
    case ConditionMode::kBelow:
      if (!(lambda_lo > 0.0)) bad_parameter("mode below needs 0 < lambda_lo");
      if (!(lambda_hi < 1.0)) bad_parameter("mode below needs lambda_hi < 1");
      break;
    case ConditionMode::kEqualFloor:
      bad_parameter("sandwich is defined for modes above and below");
  }
  resolve_ell(ell, n);

  SandwichReport report;
  report.mode = mode;
  report.lambda_star = lambda_star;
  report.ell = ell;
  report.n = n;
  report.r_star = r_star(family, lambda_star, n);

  const JointTable target = tilted_product(family, lambda_star, ell, cap);
  const ConditionedLaw base = conditioned_law(family, 1.0, ell, n, mode, report.r_star, cap);
  report.tv_base = tv_distance(base.joint, target);

  const ConditionedLaw lo_law =
      conditioned_law(family, lambda_lo, ell, n, ConditionMode::kBelow, report.r_star, cap);
  const ConditionedLaw hi_law =
      conditioned_law(family, lambda_hi, ell, n, ConditionMode::kAbove, report.r_star, cap);

  auto fill = [&](BracketCheck& out, double lambda, ConditionMode event, const JointTable& lower,
                  const JointTable& upper, const JointTable& bracket) {
    out.lambda = lambda;
    out.event = event;
    DominanceResult res = stochastic_dominance(lower, upper);
    out.holds = res.holds;
    out.flow = res.flow;
    out.certificate = std::move(res.violation_certificate);
    out.tv_to_target = tv_distance(bracket, target);
  };
  fill(report.lower, lambda_lo, ConditionMode::kBelow, lo_law.joint, base.joint, lo_law.joint);
  fill(report.upper, lambda_hi, ConditionMode::kAbove, base.joint, hi_law.joint, hi_law.joint);
  report.holds = report.lower.holds && report.upper.holds;
  return report;
}

EventOrderingReport event_ordering_check(const Family& family, std::size_t ell, std::size_t n,
                                         double r, std::size_t cap) {
  if (!std::isfinite(r)) bad_parameter("threshold must be finite");
  const auto floor_r = static_cast<std::int64_t>(std::floor(r));
  const ConditionedLaw below = conditioned_law_on(family, 1.0, ell, n, Interval::at_most(floor_r), cap);
  const ConditionedLaw equal = conditioned_law_on(family, 1.0, ell, n, Interval::point(floor_r), cap);
  const ConditionedLaw above = conditioned_law_on(family, 1.0, ell, n, Interval::above(r), cap);
  EventOrderingReport report;
  report.r = r;
  report.below_vs_floor = stochastic_dominance(below.joint, equal.joint);
  report.floor_vs_above = stochastic_dominance(equal.joint, above.joint);
  report.holds = report.below_vs_floor.holds && report.floor_vs_above.holds;
  return report;
}

}  // namespace gibbslab
