#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gibbslab/interval.hpp"
#include "gibbslab/pmf.hpp"

namespace gibbslab {

// Exact law of a sum of independent tilted members, indexed by k = 0..k_max.
struct SumLaw {
  std::vector<double> log_probs;
  std::size_t n = 0;
  double lambda = 1.0;
  double tail_mass_bound = 0.0;

  long k_max() const noexcept { return static_cast<long>(log_probs.size()) - 1; }
  double log_prob(long k) const noexcept;
  double prob(long k) const noexcept;
  double mean() const;
  // log P(S in interval).
  double log_mass(const Interval& interval) const;
};

enum class ConvolutionOrder { kSequential, kBalanced };

// Law of S^lambda_n = X^lambda_1 + ... + X^lambda_n.
SumLaw sum_law(const Family& family, double lambda, std::size_t n,
               ConvolutionOrder order = ConvolutionOrder::kSequential);

// Law of X^lambda_first + ... + X^lambda_{last-1} (0-based, half open). The
// empty range gives the point mass at zero.
SumLaw sum_law_range(const Family& family, double lambda, std::size_t first, std::size_t last);

// Laws of S^lambda_n for every n in n_list, computed in one incremental pass.
std::vector<SumLaw> sum_law_sequence(const Family& family, double lambda,
                                     std::span<const std::size_t> n_list);

// Law of S conditioned on S in interval. Throws EmptyConditionError when the
// interval carries no mass.
SumLaw condition_on_interval(const SumLaw& law, const Interval& interval);

// Values of the two Bregman-type gaps of M_n around t* for one epsilon:
//   lower = M(t* - eps) - M(t*) + eps M'(t*)
//   upper = M(t* + eps) - M(t*) - eps M'(t*)
struct GapPoint {
  double eps = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct CumulantReport {
  std::size_t n = 0;
  double t_star = 0.0;
  double M = 0.0;
  double M1 = 0.0;
  double M2 = 0.0;
  std::vector<GapPoint> gaps;
};

// M_n(t) = sum_i log Z^{e^t}_i and its first two derivatives at t* = log
// lambda_star (analytic, from tilted moments), plus gaps for each eps.
CumulantReport cumulants(const Family& family, double lambda_star, std::size_t n,
                         std::span<const double> eps_list);

// R*_n = E(S^{lambda*}_n).
double r_star(const Family& family, double lambda_star, std::size_t n);

struct ConditionTrend {
  struct Row {
    std::size_t n = 0;
    double lower = 0.0;
    double upper = 0.0;
  };

  double lambda_star = 0.0;
  double eps = 0.0;
  double threshold = 0.0;
  std::vector<Row> rows;
  // Least-squares slopes of each gap against n.
  double slope_lower = 0.0;
  double slope_upper = 0.0;
  bool diverging = false;
  std::string note;
};

// Finite-n heuristic for the divergence condition on the gaps: "diverging"
// when both gap sequences increase strictly along n_list and both exceed the
// threshold at the largest n. This is evidence, not a proof.
ConditionTrend condition_check(const Family& family, double lambda_star, double eps,
                               std::span<const std::size_t> n_list, double threshold = 10.0);

// Chernoff-style bound. For lambda > lambda_star returns an upper bound on
// log P(S^lambda_n <= R*_n); for lambda < lambda_star an upper bound on
// log P(S^lambda_n >= R*_n). In both cases the value is
// M_n(t*) - M_n(t) + (t - t*) R*_n with t = log lambda.
double chernoff_log_bound(const Family& family, double lambda, double lambda_star, std::size_t n);

// lambda such that E(S^lambda_n) = target (relative tolerance 1e-10).
double solve_tilt_for_mean(const Family& family, std::size_t n, double target);

}  // namespace gibbslab
