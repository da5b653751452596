#include "gibbslab/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gibbslab/error.hpp"

namespace gibbslab {

namespace {

constexpr double kCapSlack = 1e-12;

void require_tilt(double lambda, double cap, const char* what) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::kInvalidParameter,
                std::string(what) + ": lambda must be a positive finite number");
  }
  if (lambda > cap * (1.0 + kCapSlack)) {
    std::ostringstream os;
    os << what << ": lambda " << lambda << " exceeds the certified tilt cap " << cap;
    throw Error(ErrorKind::kInvalidParameter, os.str());
  }
}

double log_poisson(double mu, int x) { return -mu + x * std::log(mu) - std::lgamma(x + 1.0); }

// Upper bound on sum_{y > m} P_mu(y), valid once m + 2 > mu.
double poisson_tail_bound(double mu, int m) {
  const double ratio = mu / (m + 2.0);
  if (ratio >= 1.0) return 1.0;
  return std::exp(log_poisson(mu, m + 1)) / (1.0 - ratio);
}

void require_eps(double trunc_eps) {
  if (!(trunc_eps > 0.0 && trunc_eps <= 1e-6)) {
    throw Error(ErrorKind::kInvalidParameter, "trunc_eps must lie in (0, 1e-6]");
  }
}

void validate(const BaseSpec& spec) {
  using Kind = BaseSpec::Kind;
  switch (spec.kind) {
    case Kind::kWeights:
      return;
    case Kind::kGeometric:
      if (!(spec.p > 0.0 && spec.p < 1.0))
        throw Error(ErrorKind::kInvalidParameter, "geometric: p must lie in (0, 1)");
      return;
    case Kind::kPoisson:
      if (!(spec.mu > 0.0) || !std::isfinite(spec.mu))
        throw Error(ErrorKind::kInvalidParameter, "poisson: mu must be positive");
      return;
    case Kind::kBinomial:
      if (spec.m < 0) throw Error(ErrorKind::kInvalidParameter, "binomial: m must be >= 0");
      if (!(spec.q > 0.0 && spec.q < 1.0))
        throw Error(ErrorKind::kInvalidParameter, "binomial: q must lie in (0, 1)");
      return;
    case Kind::kUniform:
      if (spec.m < 0) throw Error(ErrorKind::kInvalidParameter, "uniform: m must be >= 0");
      return;
  }
}

std::vector<double> log_weights_on(const BaseSpec& spec, int support_max) {
  using Kind = BaseSpec::Kind;
  std::vector<double> lw(static_cast<std::size_t>(support_max) + 1, kLogZero);
  for (int x = 0; x <= support_max; ++x) {
    switch (spec.kind) {
      case Kind::kWeights:
        if (x < static_cast<int>(spec.weights.size()) && spec.weights[x] > 0.0)
          lw[x] = std::log(spec.weights[x]);
        break;
      case Kind::kGeometric:
        lw[x] = std::log1p(-spec.p) + x * std::log(spec.p);
        break;
      case Kind::kPoisson:
        lw[x] = log_poisson(spec.mu, x);
        break;
      case Kind::kBinomial:
        if (x <= spec.m) {
          lw[x] = std::lgamma(spec.m + 1.0) - std::lgamma(x + 1.0) - std::lgamma(spec.m - x + 1.0) +
                  x * std::log(spec.q) + (spec.m - x) * std::log1p(-spec.q);
        }
        break;
      case Kind::kUniform:
        if (x <= spec.m) lw[x] = -std::log(spec.m + 1.0);
        break;
    }
  }
  return lw;
}

}  // namespace

Pmf Pmf::from_log_weights(std::vector<double> log_weights, double tail_mass_bound, bool truncated,
                          double lambda_max, double tilt_cap) {
  if (log_weights.empty()) {
    throw Error(ErrorKind::kInvalidDistribution, "pmf needs at least one entry");
  }
  for (double v : log_weights) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw Error(ErrorKind::kInvalidDistribution, "pmf weights must be finite");
    }
  }
  const double total = log_sum_exp(log_weights);
  if (total == kLogZero) {
    throw Error(ErrorKind::kInvalidDistribution, "pmf weights are all zero");
  }
  for (double& v : log_weights) {
    if (v != kLogZero) v -= total;
  }
  Pmf pmf;
  pmf.log_probs_ = std::move(log_weights);
  pmf.tail_mass_bound_ = tail_mass_bound;
  pmf.truncated_ = truncated;
  pmf.lambda_max_ = lambda_max;
  pmf.tilt_cap_ = tilt_cap;
  return pmf;
}

double Pmf::log_prob(long x) const noexcept {
  if (x < 0 || x > support_max()) return kLogZero;
  return log_probs_[static_cast<std::size_t>(x)];
}

double Pmf::prob(long x) const noexcept {
  const double lp = log_prob(x);
  return lp == kLogZero ? 0.0 : std::exp(lp);
}

std::vector<double> Pmf::probs() const {
  std::vector<double> out(log_probs_.size());
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = prob(static_cast<long>(x));
  return out;
}

int Pmf::first_positive() const noexcept {
  for (int x = 0; x <= support_max(); ++x) {
    if (log_probs_[x] != kLogZero) return x;
  }
  return 0;
}

int Pmf::last_positive() const noexcept {
  for (int x = support_max(); x >= 0; --x) {
    if (log_probs_[x] != kLogZero) return x;
  }
  return 0;
}

BaseSpec BaseSpec::from_weights(std::vector<double> w) {
  BaseSpec s;
  s.kind = Kind::kWeights;
  s.weights = std::move(w);
  return s;
}

BaseSpec BaseSpec::geometric(double p) {
  BaseSpec s;
  s.kind = Kind::kGeometric;
  s.p = p;
  return s;
}

BaseSpec BaseSpec::poisson(double mu) {
  BaseSpec s;
  s.kind = Kind::kPoisson;
  s.mu = mu;
  return s;
}

BaseSpec BaseSpec::binomial(int m, double q) {
  BaseSpec s;
  s.kind = Kind::kBinomial;
  s.m = m;
  s.q = q;
  return s;
}

BaseSpec BaseSpec::uniform(int m) {
  BaseSpec s;
  s.kind = Kind::kUniform;
  s.m = m;
  return s;
}

double BaseSpec::analytic_lambda_max() const noexcept {
  return kind == Kind::kGeometric ? 1.0 / p : kInfinity;
}

std::string BaseSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kWeights:
      os << "weights(" << weights.size() << " entries)";
      break;
    case Kind::kGeometric:
      os << "geometric(" << p << ")";
      break;
    case Kind::kPoisson:
      os << "poisson(" << mu << ")";
      break;
    case Kind::kBinomial:
      os << "binomial(" << m << ", " << q << ")";
      break;
    case Kind::kUniform:
      os << "uniform(" << m << ")";
      break;
  }
  return os.str();
}

Pmf pmf_from_weights(std::span<const double> weights) {
  if (weights.empty()) throw Error(ErrorKind::kInvalidDistribution, "weights are empty");
  std::vector<double> lw(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::kInvalidDistribution,
                  "weight " + std::to_string(i) + " is negative or not finite");
    }
    lw[i] = w > 0.0 ? std::log(w) : kLogZero;
  }
  return Pmf::from_log_weights(std::move(lw));
}

Pmf pmf_builtin(const BaseSpec& spec, double trunc_eps, double tilt_cap) {
  require_eps(trunc_eps);
  validate(spec);
  using Kind = BaseSpec::Kind;
  switch (spec.kind) {
    case Kind::kWeights:
      return pmf_from_weights(spec.weights);
    case Kind::kBinomial:
    case Kind::kUniform:
      return Pmf::from_log_weights(log_weights_on(spec, spec.m));
    case Kind::kGeometric: {
      const double lambda_max = spec.analytic_lambda_max();
      if (!(tilt_cap > 0.0) || tilt_cap >= lambda_max) {
        throw Error(ErrorKind::kInvalidParameter,
                    "geometric: tilt cap must lie in (0, 1/p)");
      }
      // Tilting geometric(p) by c gives geometric(c p); its tail beyond m is (c p)^(m+1).
      const double ratio = std::max(tilt_cap, 1.0) * spec.p;
      int m = std::max(0, static_cast<int>(std::ceil(std::log(trunc_eps) / std::log(ratio))) - 1);
      while (std::pow(ratio, m + 1) > trunc_eps) ++m;
      while (m > 0 && std::pow(ratio, m) <= trunc_eps) --m;
      const double base_tail = std::pow(spec.p, m + 1);
      return Pmf::from_log_weights(log_weights_on(spec, m), base_tail, true, lambda_max, tilt_cap);
    }
    case Kind::kPoisson: {
      if (!(tilt_cap > 0.0) || !std::isfinite(tilt_cap)) {
        throw Error(ErrorKind::kInvalidParameter, "poisson: tilt cap must be positive and finite");
      }
      // Tilting poisson(mu) by c gives poisson(c mu).
      const double tilted_mu = std::max(tilt_cap, 1.0) * spec.mu;
      int m = 0;
      while (m + 2.0 <= tilted_mu || poisson_tail_bound(tilted_mu, m) > trunc_eps) ++m;
      const double base_tail = std::min(1.0, poisson_tail_bound(spec.mu, m));
      return Pmf::from_log_weights(log_weights_on(spec, m), base_tail, true, kInfinity, tilt_cap);
    }
  }
  throw Error(ErrorKind::kInternal, "unreachable base kind");
}

Pmf pmf_builtin_on_support(const BaseSpec& spec, int support_max) {
  validate(spec);
  if (support_max < 0) throw Error(ErrorKind::kInvalidParameter, "support_max must be >= 0");
  const bool infinite = spec.has_infinite_support();
  return Pmf::from_log_weights(log_weights_on(spec, support_max), 0.0, infinite,
                               spec.analytic_lambda_max(), kInfinity);
}

LogConcavityReport check_log_concave(const Pmf& pmf) {
  // Relative slack for entries that are equal in exact arithmetic (geometric).
  constexpr double kLogSlack = 1e-12;
  LogConcavityReport report;
  const auto lp = pmf.log_probs();
  const int last = pmf.last_positive();
  for (int x = 0; x <= last; ++x) {
    if (lp[x] == kLogZero) {
      report.has_internal_zero = true;
      break;
    }
  }
  if (!report.has_internal_zero) {
    for (int x = 1; x < last; ++x) {
      const double lhs = lp[x - 1] - lp[x];
      const double rhs = lp[x] - lp[x + 1];
      if (lhs > rhs + kLogSlack * std::max(1.0, std::abs(rhs))) {
        report.first_violation = LogConcavityReport::Violation{x, std::exp(lhs), std::exp(rhs)};
        break;
      }
    }
  }
  report.is_log_concave = !report.has_internal_zero && !report.first_violation;
  return report;
}

double log_partition_function(const Pmf& pmf, double lambda) {
  require_tilt(lambda, pmf.tilt_cap(), "partition_function");
  if (lambda == 1.0) return 0.0;
  const double log_lambda = std::log(lambda);
  const auto lp = pmf.log_probs();
  std::vector<double> terms(lp.size());
  for (std::size_t x = 0; x < lp.size(); ++x) {
    terms[x] = lp[x] == kLogZero ? kLogZero : lp[x] + static_cast<double>(x) * log_lambda;
  }
  return log_sum_exp(terms);
}

Pmf tilt(const Pmf& pmf, double lambda) {
  require_tilt(lambda, pmf.tilt_cap(), "tilt");
  if (lambda == 1.0) return pmf;
  const double log_lambda = std::log(lambda);
  const auto lp = pmf.log_probs();
  std::vector<double> out(lp.size());
  for (std::size_t x = 0; x < lp.size(); ++x) {
    out[x] = lp[x] == kLogZero ? kLogZero : lp[x] + static_cast<double>(x) * log_lambda;
  }
  return Pmf::from_log_weights(std::move(out), pmf.tail_mass_bound(), pmf.is_truncated(),
                               pmf.lambda_max() / lambda, pmf.tilt_cap() / lambda);
}

Moments moments(const Pmf& pmf) {
  const auto p = pmf.probs();
  double mean = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) mean += static_cast<double>(x) * p[x];
  double var = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    const double d = static_cast<double>(x) - mean;
    var += d * d * p[x];
  }
  return {mean, var};
}

Family::Family(std::vector<Pmf> members, std::optional<double> lambda_cap, std::size_t default_n)
    : members_(std::move(members)), default_n_(default_n) {
  if (members_.empty()) throw Error(ErrorKind::kInvalidInput, "family needs at least one member");
  double min_cap = kInfinity;
  for (const auto& m : members_) {
    lambda_max_ = std::min(lambda_max_, m.lambda_max());
    min_cap = std::min(min_cap, m.tilt_cap());
  }
  if (lambda_cap) {
    lambda_cap_ = *lambda_cap;
  } else if (std::isfinite(lambda_max_)) {
    lambda_cap_ = std::min(0.95 * lambda_max_, min_cap);
  } else {
    lambda_cap_ = min_cap;
  }
  if (!(lambda_cap_ > 0.0) || (std::isfinite(lambda_max_) && lambda_cap_ >= lambda_max_)) {
    throw Error(ErrorKind::kInvalidParameter, "family lambda cap must lie in (0, lambda_max)");
  }
  if (lambda_cap_ > min_cap * (1.0 + kCapSlack)) {
    throw Error(ErrorKind::kInvalidParameter,
                "family lambda cap exceeds the truncation cap of a member");
  }
}

std::vector<double> Family::log_partitions(double lambda, std::size_t n) const {
  require_tilt(lambda, lambda_cap_, "log_partitions");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = log_partition_function(member(i), lambda);
  return out;
}

Family Family::tilted(double lambda) const {
  require_tilt(lambda, lambda_cap_, "Family::tilted");
  std::vector<Pmf> tilted_members;
  tilted_members.reserve(members_.size());
  for (const auto& m : members_) tilted_members.push_back(tilt(m, lambda));
  return Family(std::move(tilted_members), lambda_cap_ / lambda, default_n_);
}

double lambda_max(const Family& family) { return family.lambda_max(); }

Family make_family(std::span<const BaseSpec> specs, double trunc_eps,
                   std::optional<double> lambda_cap, std::size_t default_n) {
  if (specs.empty()) throw Error(ErrorKind::kInvalidInput, "family needs at least one member");
  double lmax = kInfinity;
  bool unbounded = false;
  for (const auto& s : specs) {
    lmax = std::min(lmax, s.analytic_lambda_max());
    unbounded = unbounded || s.has_infinite_support();
  }
  double cap = kInfinity;
  if (lambda_cap) {
    cap = *lambda_cap;
  } else if (std::isfinite(lmax)) {
    cap = 0.95 * lmax;
  } else if (unbounded) {
    cap = kDefaultUnboundedCap;
  }
  if (!(cap > 0.0) || (std::isfinite(lmax) && cap >= lmax)) {
    std::ostringstream os;
    os << "lambda_cap " << cap << " must lie in (0, " << lmax << ")";
    throw Error(ErrorKind::kInvalidParameter, os.str());
  }
  std::vector<Pmf> members;
  members.reserve(specs.size());
  for (const auto& s : specs) {
    members.push_back(s.has_infinite_support() ? pmf_builtin(s, trunc_eps, cap)
                                               : pmf_builtin(s, trunc_eps));
  }
  return Family(std::move(members), std::isfinite(cap) ? std::optional<double>(cap) : std::nullopt,
                default_n);
}

}  // namespace gibbslab
