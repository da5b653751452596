#include "gibbslab/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gibbslab/error.hpp"
#include "gibbslab/parallel.hpp"
#include "gibbslab/sumstats.hpp"

namespace gibbslab {

namespace {

// Entrywise agreement required between the mixture and direct routes.
constexpr double kMixtureTolerance = 1e-11;

void require_members(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::kInvalidParameter, "need at least one coordinate");
}

double log_product(const Family& family, const Configuration& x) {
  double acc = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double v = family.member(c).log_prob(x[c]);
    if (v == kLogZero) return kLogZero;
    acc += v;
  }
  return acc;
}

std::vector<int> full_dims(const Family& family, std::size_t n) {
  std::vector<int> dims(n);
  for (std::size_t c = 0; c < n; ++c) dims[c] = family.member(c).support_max() + 1;
  return dims;
}

std::vector<int> clipped_dims(const Family& family, std::size_t n, long k) {
  std::vector<int> dims(n);
  for (std::size_t c = 0; c < n; ++c) {
    dims[c] = static_cast<int>(std::min<long>(family.member(c).support_max(), k)) + 1;
  }
  return dims;
}

Interval event_for(OrderingMode mode, double r, bool upper_side) {
  switch (mode) {
    case OrderingMode::kBothAbove:
      return Interval::above(r);
    case OrderingMode::kBothBelow:
      return Interval::below(r);
    case OrderingMode::kBelowAbove:
      return upper_side ? Interval::above(r) : Interval::below(r);
  }
  return Interval::all();
}

}  // namespace

Pmf canonical_marginal(const Family& family, std::size_t i, std::size_t n, long k) {
  require_members(n);
  if (i >= n) throw Error(ErrorKind::kInvalidParameter, "canonical_marginal: index out of range");
  const Pmf& member = family.member(i);
  if (k < 0) throw EmptyConditionError(Interval::point(k), 0.0);
  const SumLaw before = sum_law_range(family, 1.0, 0, i);
  const SumLaw after = sum_law_range(family, 1.0, i + 1, n);
  const std::vector<double> others = log_convolve(before.log_probs, after.log_probs);

  std::vector<double> lw(static_cast<std::size_t>(member.support_max()) + 1, kLogZero);
  for (int x = 0; x <= member.support_max(); ++x) {
    const long rest = k - x;
    if (rest < 0 || rest >= static_cast<long>(others.size())) continue;
    const double a = member.log_prob(x);
    const double b = others[static_cast<std::size_t>(rest)];
    if (a != kLogZero && b != kLogZero) lw[static_cast<std::size_t>(x)] = a + b;
  }
  if (log_sum_exp(lw) == kLogZero) throw EmptyConditionError(Interval::point(k), 0.0);
  return Pmf::from_log_weights(std::move(lw));
}

JointTable canonical_joint(const Family& family, std::size_t n, long k, std::size_t cap) {
  require_members(n);
  if (k < 0) throw EmptyConditionError(Interval::point(k), 0.0);
  std::vector<int> dims = clipped_dims(family, n, k);
  std::vector<double> lp(JointTable::checked_size(dims, cap), kLogZero);
  for_each_configuration(dims, [&](std::size_t flat, const Configuration& x) {
    long s = 0;
    for (int v : x) s += v;
    if (s == k) lp[flat] = log_product(family, x);
  });
  if (log_sum_exp(lp) == kLogZero) throw EmptyConditionError(Interval::point(k), 0.0);
  JointTable table(std::move(dims), std::move(lp));
  table.normalize();
  return table;
}

JointTable direct_conditional(const Family& family, double lambda, std::size_t n,
                              const Interval& interval, std::size_t cap) {
  require_members(n);
  std::vector<Pmf> tilted;
  tilted.reserve(n);
  for (std::size_t c = 0; c < n; ++c) tilted.push_back(tilt(family.member(c), lambda));
  const std::vector<int> dims = full_dims(family, n);
  std::vector<double> lp(JointTable::checked_size(dims, cap), kLogZero);
  for_each_configuration(dims, [&](std::size_t flat, const Configuration& x) {
    long s = 0;
    for (int v : x) s += v;
    if (!interval.contains(s)) return;
    double acc = 0.0;
    for (std::size_t c = 0; c < n && acc != kLogZero; ++c) {
      const double v = tilted[c].log_prob(x[c]);
      acc = v == kLogZero ? kLogZero : acc + v;
    }
    lp[flat] = acc;
  });
  if (log_sum_exp(lp) == kLogZero) throw EmptyConditionError(interval, 0.0);
  JointTable table(dims, std::move(lp));
  table.normalize();
  return table;
}

JointTable mixture_conditional(const Family& family, double lambda, std::size_t n,
                               const Interval& interval, std::size_t cap) {
  require_members(n);
  const SumLaw base = sum_law(family, 1.0, n);
  const SumLaw conditioned = condition_on_interval(sum_law(family, lambda, n), interval);

  const std::vector<int> dims = full_dims(family, n);
  std::vector<double> lp(JointTable::checked_size(dims, cap), kLogZero);
  for_each_configuration(dims, [&](std::size_t flat, const Configuration& x) {
    long s = 0;
    for (int v : x) s += v;
    const double weight = conditioned.log_prob(s);
    if (weight == kLogZero) return;
    const double joint = log_product(family, x);
    if (joint == kLogZero) return;
    // pi^lambda_n(s | I) * mu_n(x | s)
    lp[flat] = weight + joint - base.log_prob(s);
  });
  JointTable mixture(dims, std::move(lp));

  const JointTable direct = direct_conditional(family, lambda, n, interval, cap);
  double worst = 0.0;
  for (std::size_t f = 0; f < mixture.size(); ++f) {
    worst = std::max(worst, std::abs(mixture.prob(f) - direct.prob(f)));
  }
  if (worst > kMixtureTolerance) {
    std::ostringstream os;
    os << "mixture_conditional: canonical mixture and direct conditioning differ by " << worst;
    throw Error(ErrorKind::kInternal, os.str());
  }
  return mixture;
}

EfronReport efron_check(const Family& family, std::size_t n, long k_max, std::size_t cap) {
  require_members(n);
  if (k_max < 1) throw Error(ErrorKind::kInvalidParameter, "efron_check: k_max must be >= 1");
  EfronReport report;
  report.n = n;
  report.k_max = k_max;
  report.all_log_concave = true;
  for (std::size_t c = 0; c < n; ++c) {
    report.member_reports.push_back(check_log_concave(family.member(c)));
    report.all_log_concave = report.all_log_concave && report.member_reports.back().is_log_concave;
  }

  report.pairs.resize(static_cast<std::size_t>(k_max));
  parallel_for(report.pairs.size(), [&](std::size_t idx) {
    const long k = static_cast<long>(idx);
    EfronPair pair;
    pair.k = k;
    const std::vector<int> dims = clipped_dims(family, n, k + 1);
    bool fits = true;
    try {
      JointTable::checked_size(dims, cap);
    } catch (const Error&) {
      fits = false;
    }
    if (fits) {
      const JointTable lower = canonical_joint(family, n, k, cap).embed(dims);
      const JointTable upper = canonical_joint(family, n, k + 1, cap);
      DominanceResult res = stochastic_dominance(lower, upper);
      pair.holds = res.holds;
      pair.flow = res.flow;
      pair.certificate = std::move(res.violation_certificate);
    } else {
      // Necessary condition only: every coordinate marginal is ordered.
      pair.marginal_only = true;
      pair.holds = true;
      for (std::size_t c = 0; c < n && pair.holds; ++c) {
        pair.holds = cdf_dominated(canonical_marginal(family, c, n, k),
                                   canonical_marginal(family, c, n, k + 1));
      }
      pair.flow = pair.holds ? 1.0 : 0.0;
    }
    report.pairs[idx] = std::move(pair);
  });

  report.all_hold = true;
  for (const auto& p : report.pairs) {
    report.all_hold = report.all_hold && p.holds;
    report.degraded = report.degraded || p.marginal_only;
  }
  return report;
}

DominanceResult tilt_ordering_check(const Family& family, double lambda, double lambda2,
                                   std::size_t n, double r, OrderingMode mode, std::size_t cap) {
  if (!(lambda > 0.0) || lambda > lambda2) {
    throw Error(ErrorKind::kInvalidParameter, "tilt_ordering_check: need 0 < lambda <= lambda2");
  }
  const JointTable lower = mixture_conditional(family, lambda, n, event_for(mode, r, false), cap);
  const JointTable upper = mixture_conditional(family, lambda2, n, event_for(mode, r, true), cap);
  return stochastic_dominance(lower, upper);
}

std::vector<double> jump_rates_from_pmf(const Pmf& pmf) {
  const int top = pmf.last_positive();
  std::vector<double> g(static_cast<std::size_t>(top) + 1, 0.0);
  for (int z = 1; z <= top; ++z) {
    const double num = pmf.log_prob(z - 1);
    const double den = pmf.log_prob(z);
    if (num == kLogZero || den == kLogZero) {
      throw Error(ErrorKind::kInvalidDistribution,
                  "jump rates need positive mass on [0, max]; zero at " + std::to_string(z));
    }
    g[static_cast<std::size_t>(z)] = std::exp(num - den);
  }
  return g;
}

}  // namespace gibbslab
