#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gibbslab/log_math.hpp"

namespace gibbslab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultTruncEps = 1e-13;

// Probability mass function on {0, ..., support_max}, stored as normalized
// log-probabilities. Exact zeros are stored as kLogZero.
//
// Besides the masses, a Pmf remembers two tilt-related quantities:
//  - lambda_max: sup of tilts with finite partition function for the
//    untruncated law it came from (+inf for finite support);
//  - tilt_cap: largest tilt for which truncation error is certified.
// Tilting by lambda divides both by lambda.
class Pmf {
 public:
  // Normalizes log_weights. Throws InvalidDistribution on empty input, NaN,
  // +inf or zero total mass.
  static Pmf from_log_weights(std::vector<double> log_weights, double tail_mass_bound = 0.0,
                              bool truncated = false, double lambda_max = kInfinity,
                              double tilt_cap = kInfinity);

  std::span<const double> log_probs() const noexcept { return log_probs_; }
  int support_max() const noexcept { return static_cast<int>(log_probs_.size()) - 1; }
  double tail_mass_bound() const noexcept { return tail_mass_bound_; }
  bool is_truncated() const noexcept { return truncated_; }
  double lambda_max() const noexcept { return lambda_max_; }
  double tilt_cap() const noexcept { return tilt_cap_; }

  double log_prob(long x) const noexcept;
  double prob(long x) const noexcept;
  std::vector<double> probs() const;

  // Smallest / largest x with positive mass.
  int first_positive() const noexcept;
  int last_positive() const noexcept;

 private:
  Pmf() = default;

  std::vector<double> log_probs_;
  double tail_mass_bound_ = 0.0;
  bool truncated_ = false;
  double lambda_max_ = kInfinity;
  double tilt_cap_ = kInfinity;
};

// Description of a base law, as it appears in family files.
struct BaseSpec {
  enum class Kind { kWeights, kGeometric, kPoisson, kBinomial, kUniform };

  Kind kind = Kind::kWeights;
  double p = 0.0;   // geometric ratio: P(x) = (1 - p) p^x
  double mu = 0.0;  // poisson mean
  double q = 0.0;   // binomial success probability
  int m = 0;        // binomial trials, uniform upper end
  std::vector<double> weights;

  static BaseSpec from_weights(std::vector<double> w);
  static BaseSpec geometric(double p);
  static BaseSpec poisson(double mu);
  static BaseSpec binomial(int m, double q);
  static BaseSpec bernoulli(double q) { return binomial(1, q); }
  static BaseSpec uniform(int m);

  bool has_infinite_support() const noexcept {
    return kind == Kind::kGeometric || kind == Kind::kPoisson;
  }
  // Radius of convergence of the partition function.
  double analytic_lambda_max() const noexcept;
  std::string describe() const;
};

Pmf pmf_from_weights(std::span<const double> weights);

// Builds a base law. Infinite-support kinds are truncated at the smallest
// support_max whose tail mass, after tilting by max(tilt_cap, 1), is at most
// trunc_eps. trunc_eps must lie in (0, 1e-6].
Pmf pmf_builtin(const BaseSpec& spec, double trunc_eps = kDefaultTruncEps, double tilt_cap = 1.0);

// Same law restricted and renormalized to {0, ..., support_max}. Used to
// compare tilted laws on a shared truncation.
Pmf pmf_builtin_on_support(const BaseSpec& spec, int support_max);

struct LogConcavityReport {
  struct Violation {
    int x = 0;
    double left_ratio = 0.0;   // nu(x-1) / nu(x)
    double right_ratio = 0.0;  // nu(x) / nu(x+1)
  };

  bool is_log_concave = false;
  bool has_internal_zero = false;
  std::optional<Violation> first_violation;
};

// nu(x)^2 >= nu(x-1) nu(x+1) for 0 < x < max, and nu > 0 on [0, max], where
// max is the last index with positive mass.
LogConcavityReport check_log_concave(const Pmf& pmf);

// log Z^lambda = log sum_x lambda^x nu(x).
double log_partition_function(const Pmf& pmf, double lambda);

// nu^lambda(x) = lambda^x nu(x) / Z^lambda on the same support.
Pmf tilt(const Pmf& pmf, double lambda);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

Moments moments(const Pmf& pmf);

// An ordered family nu_1, nu_2, ... given by a finite member list repeated
// cyclically. All members are immutable.
class Family {
 public:
  // lambda_cap defaults to 0.95 lambda_max when that is finite, otherwise to
  // the smallest certified tilt cap among the members.
  explicit Family(std::vector<Pmf> members, std::optional<double> lambda_cap = std::nullopt,
                  std::size_t default_n = 0);

  const Pmf& member(std::size_t i) const { return members_[i % members_.size()]; }
  std::span<const Pmf> distinct_members() const noexcept { return members_; }
  std::size_t default_n() const noexcept { return default_n_; }

  double lambda_max() const noexcept { return lambda_max_; }
  double lambda_cap() const noexcept { return lambda_cap_; }

  // log Z^lambda_i for i = 0..n-1.
  std::vector<double> log_partitions(double lambda, std::size_t n) const;

  // Family whose members are the lambda-tilted members of this one.
  Family tilted(double lambda) const;

 private:
  std::vector<Pmf> members_;
  double lambda_max_ = kInfinity;
  double lambda_cap_ = kInfinity;
  std::size_t default_n_ = 0;
};

double lambda_max(const Family& family);

// Working cap used by make_family when none is declared and lambda_max is
// infinite but some member has infinite support.
inline constexpr double kDefaultUnboundedCap = 4.0;

// Builds members from specs, truncating infinite-support kinds against the
// working cap (declared, else 0.95 lambda_max, else kDefaultUnboundedCap).
Family make_family(std::span<const BaseSpec> specs, double trunc_eps = kDefaultTruncEps,
                   std::optional<double> lambda_cap = std::nullopt, std::size_t default_n = 0);

}  // namespace gibbslab
