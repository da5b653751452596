#include "gibbslab/sumstats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gibbslab/error.hpp"

namespace gibbslab {

namespace {

// How many of the first n members are copies of each distinct member.
std::vector<std::size_t> member_counts(const Family& family, std::size_t n) {
  const std::size_t m = family.distinct_members().size();
  std::vector<std::size_t> counts(m, n / m);
  for (std::size_t i = 0; i < n % m; ++i) ++counts[i];
  return counts;
}

struct TiltedTotals {
  double log_z = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

TiltedTotals tilted_totals(const Family& family, double lambda, std::size_t n) {
  const auto counts = member_counts(family, n);
  const auto members = family.distinct_members();
  TiltedTotals totals;
  for (std::size_t d = 0; d < members.size(); ++d) {
    if (counts[d] == 0) continue;
    const double c = static_cast<double>(counts[d]);
    const Pmf tilted = tilt(members[d], lambda);
    const Moments mom = moments(tilted);
    totals.log_z += c * log_partition_function(members[d], lambda);
    totals.mean += c * mom.mean;
    totals.variance += c * mom.variance;
  }
  return totals;
}

double log_m(const Family& family, double lambda, std::size_t n) {
  const auto counts = member_counts(family, n);
  const auto members = family.distinct_members();
  double total = 0.0;
  for (std::size_t d = 0; d < members.size(); ++d) {
    if (counts[d] == 0) continue;
    total += static_cast<double>(counts[d]) * log_partition_function(members[d], lambda);
  }
  return total;
}

void require_n(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::kInvalidParameter, "number of summands must be >= 1");
}

void require_lambda(const Family& family, double lambda, const char* what) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::kInvalidParameter, std::string(what) + ": lambda must be positive");
  }
  if (lambda > family.lambda_cap() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << what << ": lambda " << lambda << " exceeds the family cap " << family.lambda_cap();
    throw Error(ErrorKind::kInvalidParameter, os.str());
  }
}

SumLaw point_mass_at_zero(double lambda) {
  SumLaw law;
  law.log_probs = {0.0};
  law.n = 0;
  law.lambda = lambda;
  return law;
}

SumLaw convolve(const SumLaw& a, const SumLaw& b) {
  SumLaw out;
  out.log_probs = log_convolve(a.log_probs, b.log_probs);
  out.n = a.n + b.n;
  out.lambda = a.lambda;
  out.tail_mass_bound = a.tail_mass_bound + b.tail_mass_bound;
  return out;
}

SumLaw single(const Pmf& tilted, double lambda) {
  SumLaw law;
  law.log_probs.assign(tilted.log_probs().begin(), tilted.log_probs().end());
  law.n = 1;
  law.lambda = lambda;
  law.tail_mass_bound = tilted.tail_mass_bound();
  return law;
}

SumLaw balanced(const std::vector<Pmf>& tilted, std::size_t lo, std::size_t hi, double lambda) {
  if (hi - lo == 1) return single(tilted[lo], lambda);
  const std::size_t mid = lo + (hi - lo) / 2;
  return convolve(balanced(tilted, lo, mid, lambda), balanced(tilted, mid, hi, lambda));
}

std::vector<Pmf> tilted_members(const Family& family, double lambda) {
  std::vector<Pmf> out;
  for (const auto& m : family.distinct_members()) out.push_back(tilt(m, lambda));
  return out;
}

}  // namespace

double SumLaw::log_prob(long k) const noexcept {
  if (k < 0 || k > k_max()) return kLogZero;
  return log_probs[static_cast<std::size_t>(k)];
}

double SumLaw::prob(long k) const noexcept {
  const double lp = log_prob(k);
  return lp == kLogZero ? 0.0 : std::exp(lp);
}

double SumLaw::mean() const {
  double acc = 0.0;
  for (long k = 0; k <= k_max(); ++k) acc += static_cast<double>(k) * prob(k);
  return acc;
}

double SumLaw::log_mass(const Interval& interval) const {
  const std::int64_t lo = std::max<std::int64_t>(interval.lo(), 0);
  const std::int64_t hi = std::min<std::int64_t>(interval.hi(), k_max());
  if (lo > hi) return kLogZero;
  return log_sum_exp(std::span<const double>(log_probs).subspan(
      static_cast<std::size_t>(lo), static_cast<std::size_t>(hi - lo + 1)));
}

SumLaw sum_law(const Family& family, double lambda, std::size_t n, ConvolutionOrder order) {
  require_n(n);
  if (order == ConvolutionOrder::kSequential) return sum_law_range(family, lambda, 0, n);
  require_lambda(family, lambda, "sum_law");
  const auto distinct = tilted_members(family, lambda);
  std::vector<Pmf> members;
  members.reserve(n);
  for (std::size_t i = 0; i < n; ++i) members.push_back(distinct[i % distinct.size()]);
  return balanced(members, 0, n, lambda);
}

SumLaw sum_law_range(const Family& family, double lambda, std::size_t first, std::size_t last) {
  require_lambda(family, lambda, "sum_law");
  if (last < first) throw Error(ErrorKind::kInvalidParameter, "sum_law_range: last < first");
  const auto distinct = tilted_members(family, lambda);
  const std::size_t m = distinct.size();
  SumLaw law = point_mass_at_zero(lambda);
  for (std::size_t i = first; i < last; ++i) law = convolve(law, single(distinct[i % m], lambda));
  return law;
}

std::vector<SumLaw> sum_law_sequence(const Family& family, double lambda,
                                     std::span<const std::size_t> n_list) {
  require_lambda(family, lambda, "sum_law_sequence");
  std::vector<std::size_t> order(n_list.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return n_list[a] < n_list[b]; });
  const auto distinct = tilted_members(family, lambda);
  std::vector<SumLaw> out(n_list.size());
  SumLaw law = point_mass_at_zero(lambda);
  std::size_t done = 0;
  for (std::size_t idx : order) {
    require_n(n_list[idx]);
    while (done < n_list[idx]) {
      law = convolve(law, single(distinct[done % distinct.size()], lambda));
      ++done;
    }
    out[idx] = law;
  }
  return out;
}

SumLaw condition_on_interval(const SumLaw& law, const Interval& interval) {
  const double log_mass = law.log_mass(interval);
  if (log_mass == kLogZero) throw EmptyConditionError(interval, 0.0);
  SumLaw out = law;
  for (long k = 0; k <= law.k_max(); ++k) {
    auto& v = out.log_probs[static_cast<std::size_t>(k)];
    v = interval.contains(k) && v != kLogZero ? v - log_mass : kLogZero;
  }
  return out;
}

CumulantReport cumulants(const Family& family, double lambda_star, std::size_t n,
                         std::span<const double> eps_list) {
  require_n(n);
  require_lambda(family, lambda_star, "cumulants");
  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw Error(ErrorKind::kInvalidParameter, "cumulants: eps must be positive");
    require_lambda(family, lambda_star * std::exp(eps), "cumulants (shifted tilt)");
  }
  const TiltedTotals at_star = tilted_totals(family, lambda_star, n);
  CumulantReport report;
  report.n = n;
  report.t_star = std::log(lambda_star);
  report.M = at_star.log_z;
  report.M1 = at_star.mean;
  report.M2 = at_star.variance;
  for (double eps : eps_list) {
    const double m_minus = log_m(family, lambda_star * std::exp(-eps), n);
    const double m_plus = log_m(family, lambda_star * std::exp(eps), n);
    report.gaps.push_back({eps, m_minus - report.M + eps * report.M1,
                           m_plus - report.M - eps * report.M1});
  }
  return report;
}

double r_star(const Family& family, double lambda_star, std::size_t n) {
  require_n(n);
  require_lambda(family, lambda_star, "r_star");
  return tilted_totals(family, lambda_star, n).mean;
}

ConditionTrend condition_check(const Family& family, double lambda_star, double eps,
                               std::span<const std::size_t> n_list, double threshold) {
  if (n_list.empty()) throw Error(ErrorKind::kInvalidParameter, "condition_check: empty n list");
  ConditionTrend trend;
  trend.lambda_star = lambda_star;
  trend.eps = eps;
  trend.threshold = threshold;
  const double eps_arr[] = {eps};
  for (std::size_t n : n_list) {
    const auto rep = cumulants(family, lambda_star, n, eps_arr);
    trend.rows.push_back({n, rep.gaps[0].lower, rep.gaps[0].upper});
  }
  std::sort(trend.rows.begin(), trend.rows.end(),
            [](const auto& a, const auto& b) { return a.n < b.n; });

  const double count = static_cast<double>(trend.rows.size());
  double mean_n = 0.0;
  double mean_lo = 0.0;
  double mean_up = 0.0;
  for (const auto& r : trend.rows) {
    mean_n += static_cast<double>(r.n) / count;
    mean_lo += r.lower / count;
    mean_up += r.upper / count;
  }
  double sxx = 0.0;
  double sxl = 0.0;
  double sxu = 0.0;
  for (const auto& r : trend.rows) {
    const double dx = static_cast<double>(r.n) - mean_n;
    sxx += dx * dx;
    sxl += dx * (r.lower - mean_lo);
    sxu += dx * (r.upper - mean_up);
  }
  if (sxx > 0.0) {
    trend.slope_lower = sxl / sxx;
    trend.slope_upper = sxu / sxx;
  }

  // Relative slack so that round-off in flat sequences is not read as growth.
  auto increasing = [](double prev, double next) {
    return next > prev + 1e-9 * std::max(1.0, std::abs(prev));
  };
  bool strictly_increasing = trend.rows.size() >= 2;
  for (std::size_t i = 1; i < trend.rows.size(); ++i) {
    strictly_increasing = strictly_increasing &&
                          increasing(trend.rows[i - 1].lower, trend.rows[i].lower) &&
                          increasing(trend.rows[i - 1].upper, trend.rows[i].upper);
  }
  const auto& last = trend.rows.back();
  trend.diverging = strictly_increasing && last.lower > threshold && last.upper > threshold;
  trend.note =
      "finite-n heuristic: both gaps strictly increasing in n and above the threshold at the "
      "largest n; not a proof of divergence";
  return trend;
}

double chernoff_log_bound(const Family& family, double lambda, double lambda_star, std::size_t n) {
  require_n(n);
  require_lambda(family, lambda, "chernoff_log_bound");
  require_lambda(family, lambda_star, "chernoff_log_bound");
  if (lambda == lambda_star) {
    throw Error(ErrorKind::kInvalidParameter, "chernoff_log_bound: lambda must differ from lambda*");
  }
  const double t = std::log(lambda);
  const double t_star = std::log(lambda_star);
  const TiltedTotals star = tilted_totals(family, lambda_star, n);
  return star.log_z - log_m(family, lambda, n) + (t - t_star) * star.mean;
}

double solve_tilt_for_mean(const Family& family, std::size_t n, double target) {
  require_n(n);
  auto mean_at = [&](double t) { return tilted_totals(family, std::exp(t), n); };

  double floor_mean = 0.0;
  double ceiling_mean = 0.0;
  {
    const auto counts = member_counts(family, n);
    const auto members = family.distinct_members();
    for (std::size_t d = 0; d < members.size(); ++d) {
      floor_mean += static_cast<double>(counts[d]) * members[d].first_positive();
      ceiling_mean += static_cast<double>(counts[d]) * members[d].last_positive();
    }
  }
  auto unreachable = [&](const std::string& why) {
    std::ostringstream os;
    os << "solve_tilt_for_mean: target " << target << " " << why;
    return Error(ErrorKind::kTargetUnreachable, os.str());
  };
  if (!(target > floor_mean)) throw unreachable("is not above the lowest attainable mean");

  // Largest admissible log-tilt, keeping exp(t) finite.
  constexpr double kMaxLogTilt = 700.0;
  double t_hi = 0.0;
  if (std::isfinite(family.lambda_cap())) {
    t_hi = std::log(family.lambda_cap());
    if (mean_at(t_hi).mean < target) throw unreachable("is beyond the mean at the lambda cap");
  } else {
    if (!(target < ceiling_mean)) throw unreachable("is not below the largest attainable mean");
    t_hi = 1.0;
    while (mean_at(t_hi).mean < target) {
      if (t_hi >= kMaxLogTilt) throw unreachable("needs a tilt beyond the numeric range");
      t_hi = std::min(2.0 * t_hi, kMaxLogTilt);
    }
  }
  double t_lo = std::min(0.0, t_hi) - 1.0;
  while (mean_at(t_lo).mean > target) {
    if (t_lo <= -kMaxLogTilt) throw unreachable("needs a tilt beyond the numeric range");
    t_lo = std::max(2.0 * t_lo, -kMaxLogTilt);
  }

  double t = 0.5 * (t_lo + t_hi);
  const double tol = 1e-13 * std::max(1.0, std::abs(target));
  for (int iter = 0; iter < 500; ++iter) {
    const TiltedTotals at = mean_at(t);
    const double f = at.mean - target;
    if (std::abs(f) <= tol) break;
    if (f < 0.0) {
      t_lo = t;
    } else {
      t_hi = t;
    }
    if (t_hi - t_lo < 1e-15 * std::max(1.0, std::abs(t))) break;
    // Newton step on the increasing map t -> M'(t), guarded by the bracket.
    double next = at.variance > 0.0 ? t - f / at.variance : 0.5 * (t_lo + t_hi);
    if (!(next > t_lo && next < t_hi)) next = 0.5 * (t_lo + t_hi);
    t = next;
  }
  return std::exp(t);
}

}  // namespace gibbslab
