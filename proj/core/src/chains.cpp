#include "gibbslab/chains.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <string>

#include "gibbslab/canonical.hpp"

namespace gibbslab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

[[noreturn]] void bad(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

void coupled_moves(const BirthDeathRates& first, const BirthDeathRates& second, BDPair s,
                   std::vector<CoupledRate>& out) {
  auto push = [&](int dk, int dk2, double rate, int clause) {
    if (rate > 0.0) out.push_back({s, {s.k + dk, s.k2 + dk2}, rate, clause});
  };
  if (s.k == s.k2) {
    const double joint_up = first.up(s.k);
    push(1, 1, joint_up, 1);
    if (second.up(s.k2) > 0.0) push(0, 1, second.up(s.k2) - joint_up, 2);
    push(-1, -1, first.down(s.k), 3);
  } else {
    push(1, 0, first.up(s.k), 4);
    push(0, 1, second.up(s.k2), 5);
    push(0, -1, second.down(s.k2), 6);
    push(-1, 0, first.down(s.k), 7);
  }
}

bool leq(const Configuration& a, const Configuration& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

void check_configuration(const ZeroRangeSpec& spec, const Configuration& x, const char* what) {
  if (x.size() != spec.sites()) {
    bad(ErrorKind::kInvalidInput, std::string(what) + ": configuration has wrong length");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] > spec.capacity[i]) {
      bad(ErrorKind::kInvalidInput,
          std::string(what) + ": occupancy out of range at site " + std::to_string(i));
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

RngStream RngStream::split(std::uint64_t child) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(stream_)), child);
}

GeneratorModel::GeneratorModel(std::vector<std::vector<double>> rates) : rates_(std::move(rates)) {
  for (const auto& row : rates_) {
    if (row.size() != rates_.size()) bad(ErrorKind::kInvalidInput, "generator must be square");
    for (double r : row) {
      if (!(r >= 0.0) || !std::isfinite(r)) {
        bad(ErrorKind::kInvalidInput, "generator rates must be finite and nonnegative");
      }
    }
  }
}

void GeneratorModel::moves(const State& s, std::vector<Move>& out) const {
  const auto& row = rates_.at(static_cast<std::size_t>(s));
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (static_cast<int>(j) != s && row[j] > 0.0) out.push_back({static_cast<int>(j), row[j]});
  }
}

OccupationEstimator::OccupationEstimator(std::size_t categories, double horizon, std::size_t batches)
    : categories_(categories), horizon_(horizon), batches_(batches),
      time_(categories * batches, 0.0) {
  if (!(horizon > 0.0) || !std::isfinite(horizon) || batches < 2 || categories == 0) {
    bad(ErrorKind::kInvalidParameter, "occupation estimator needs a finite horizon and >= 2 batches");
  }
}

void OccupationEstimator::add(std::size_t category, double start, double duration) {
  if (category >= categories_) bad(ErrorKind::kInvalidInput, "occupation category out of range");
  const double width = horizon_ / static_cast<double>(batches_);
  double t = std::max(start, 0.0);
  const double stop = std::min(start + duration, horizon_);
  while (t < stop) {
    auto b = static_cast<std::size_t>(t / width);
    if (b >= batches_) b = batches_ - 1;
    const double edge = b + 1 == batches_ ? horizon_ : static_cast<double>(b + 1) * width;
    const double piece = std::min(stop, edge) - t;
    time_[b * categories_ + category] += piece;
    if (edge <= t) break;
    t = std::min(stop, edge);
  }
}

std::vector<double> OccupationEstimator::fractions() const {
  std::vector<double> out(categories_, 0.0);
  for (std::size_t b = 0; b < batches_; ++b) {
    for (std::size_t c = 0; c < categories_; ++c) out[c] += time_[b * categories_ + c];
  }
  for (double& v : out) v /= horizon_;
  return out;
}

std::vector<double> OccupationEstimator::standard_errors() const {
  const double width = horizon_ / static_cast<double>(batches_);
  const std::vector<double> mean = fractions();
  std::vector<double> out(categories_, 0.0);
  for (std::size_t c = 0; c < categories_; ++c) {
    double ss = 0.0;
    for (std::size_t b = 0; b < batches_; ++b) {
      const double d = time_[b * categories_ + c] / width - mean[c];
      ss += d * d;
    }
    const double var = ss / static_cast<double>(batches_ - 1);
    out[c] = std::sqrt(var / static_cast<double>(batches_));
  }
  return out;
}

// ---------------------------------------------------------------------------

void validate(const BirthDeathSpec& spec) {
  if (!(spec.lambda > 0.0) || !std::isfinite(spec.lambda)) {
    bad(ErrorKind::kInvalidParameter, "birth rate lambda must be positive and finite");
  }
  if (spec.lo < 0 || spec.lo > spec.hi) bad(ErrorKind::kInvalidParameter, "interval is empty");
  if (spec.hi > spec.base_law.support_max()) {
    bad(ErrorKind::kInvalidParameter, "interval exceeds the base law support (max " +
                                          std::to_string(spec.base_law.support_max()) + ")");
  }
  for (int k = spec.lo; k <= spec.hi; ++k) {
    if (spec.base_law.log_prob(k) == kLogZero) {
      bad(ErrorKind::kInvalidDistribution,
          "base law has zero mass at " + std::to_string(k) + " inside the interval");
    }
  }
}

BirthDeathRates bd_generator(const BirthDeathSpec& spec) {
  validate(spec);
  BirthDeathRates r;
  r.lo = spec.lo;
  r.hi = spec.hi;
  const auto m = static_cast<std::size_t>(spec.hi - spec.lo + 1);
  r.birth.assign(m, 0.0);
  r.death.assign(m, 0.0);
  for (int k = spec.lo; k <= spec.hi; ++k) {
    const auto idx = static_cast<std::size_t>(k - spec.lo);
    if (k < spec.hi) r.birth[idx] = spec.lambda;
    if (k > spec.lo) {
      r.death[idx] = std::exp(spec.base_law.log_prob(k - 1) - spec.base_law.log_prob(k));
    }
  }
  return r;
}

Pmf bd_stationary(const BirthDeathSpec& spec) {
  const BirthDeathRates r = bd_generator(spec);
  std::vector<double> lw(static_cast<std::size_t>(spec.hi) + 1, kLogZero);
  lw[static_cast<std::size_t>(spec.lo)] = 0.0;
  for (int k = spec.lo; k < spec.hi; ++k) {
    // pi(k) q(k, k+1) = pi(k+1) q(k+1, k)
    lw[static_cast<std::size_t>(k) + 1] =
        lw[static_cast<std::size_t>(k)] + std::log(r.up(k)) - std::log(r.down(k + 1));
  }
  return Pmf::from_log_weights(std::move(lw));
}

void BirthDeathModel::moves(const State& k, std::vector<Move>& out) const {
  if (rates_.up(k) > 0.0) out.push_back({1, rates_.up(k)});
  if (rates_.down(k) > 0.0) out.push_back({-1, rates_.down(k)});
}

void validate(const CoupledBDSpec& spec) {
  validate(spec.first());
  validate(spec.second());
  if (spec.lambda > spec.lambda2) {
    bad(ErrorKind::kInvalidParameter, "coupling needs lambda <= lambda2");
  }
}

std::vector<CoupledRate> coupled_bd_transitions(const CoupledBDSpec& spec, BDPair state) {
  validate(spec);
  if (state.k < spec.lo || state.k > spec.hi || state.k2 < spec.lo || state.k2 > spec.hi) {
    bad(ErrorKind::kInvalidInput, "coupled state outside I x I");
  }
  std::vector<CoupledRate> out;
  coupled_moves(bd_generator(spec.first()), bd_generator(spec.second()), state, out);
  return out;
}

CoupledBDGenerator coupled_bd_generator(const CoupledBDSpec& spec) {
  validate(spec);
  const BirthDeathRates first = bd_generator(spec.first());
  const BirthDeathRates second = bd_generator(spec.second());
  CoupledBDGenerator gen;
  gen.lo = spec.lo;
  gen.hi = spec.hi;
  for (int k = spec.lo; k <= spec.hi; ++k) {
    for (int k2 = spec.lo; k2 <= spec.hi; ++k2) coupled_moves(first, second, {k, k2}, gen.rates);
  }
  return gen;
}

double CoupledStationary::prob(int k, int k2) const {
  if (k < lo || k > hi || k2 < lo || k2 > hi) return 0.0;
  return probs[static_cast<std::size_t>(k - lo) * static_cast<std::size_t>(side()) +
               static_cast<std::size_t>(k2 - lo)];
}

double CoupledStationary::unordered_mass() const {
  double acc = 0.0;
  for (int k = lo; k <= hi; ++k) {
    for (int k2 = lo; k2 < k; ++k2) acc += std::abs(prob(k, k2));
  }
  return acc;
}

Pmf CoupledStationary::first_marginal() const {
  std::vector<double> lw(static_cast<std::size_t>(hi) + 1, kLogZero);
  for (int k = lo; k <= hi; ++k) {
    double acc = 0.0;
    for (int k2 = lo; k2 <= hi; ++k2) acc += prob(k, k2);
    if (acc > 0.0) lw[static_cast<std::size_t>(k)] = std::log(acc);
  }
  return Pmf::from_log_weights(std::move(lw));
}

Pmf CoupledStationary::second_marginal() const {
  std::vector<double> lw(static_cast<std::size_t>(hi) + 1, kLogZero);
  for (int k2 = lo; k2 <= hi; ++k2) {
    double acc = 0.0;
    for (int k = lo; k <= hi; ++k) acc += prob(k, k2);
    if (acc > 0.0) lw[static_cast<std::size_t>(k2)] = std::log(acc);
  }
  return Pmf::from_log_weights(std::move(lw));
}

CoupledStationary coupled_bd_stationary(const CoupledBDSpec& spec, int max_side) {
  validate(spec);
  const int side = spec.hi - spec.lo + 1;
  if (side > max_side) {
    bad(ErrorKind::kInstanceTooLarge, "coupled stationary solve: |I| = " + std::to_string(side) +
                                          " exceeds the cap " + std::to_string(max_side));
  }
  const BirthDeathRates first = bd_generator(spec.first());
  const BirthDeathRates second = bd_generator(spec.second());
  const auto m = static_cast<std::size_t>(side);
  auto flat = [&](BDPair s) {
    return static_cast<std::size_t>(s.k - spec.lo) * m + static_cast<std::size_t>(s.k2 - spec.lo);
  };

  // Communicating class of (lo, lo).
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(m * m, kUnseen);
  std::vector<BDPair> states;
  std::deque<BDPair> queue{{spec.lo, spec.lo}};
  index[flat(queue.front())] = 0;
  states.push_back(queue.front());
  std::vector<CoupledRate> moves;
  while (!queue.empty()) {
    const BDPair s = queue.front();
    queue.pop_front();
    moves.clear();
    coupled_moves(first, second, s, moves);
    for (const auto& mv : moves) {
      std::size_t& slot = index[flat(mv.to)];
      if (slot == kUnseen) {
        slot = states.size();
        states.push_back(mv.to);
        queue.push_back(mv.to);
      }
    }
  }

  // pi Q = 0 as Q^T pi = 0 with the first equation replaced by sum(pi) = 1.
  const auto n = static_cast<Eigen::Index>(states.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(states.size() * 6);
  for (std::size_t col = 0; col < states.size(); ++col) {
    moves.clear();
    coupled_moves(first, second, states[col], moves);
    double out_rate = 0.0;
    for (const auto& mv : moves) {
      const std::size_t row = index[flat(mv.to)];
      out_rate += mv.rate;
      if (row != 0) triplets.emplace_back(static_cast<Eigen::Index>(row), col, mv.rate);
    }
    if (col != 0) triplets.emplace_back(static_cast<Eigen::Index>(col), col, -out_rate);
    triplets.emplace_back(0, static_cast<Eigen::Index>(col), 1.0);
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(0) = 1.0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(a);
  if (solver.info() != Eigen::Success) {
    bad(ErrorKind::kInternal, "coupled stationary solve: factorization failed");
  }
  const Eigen::VectorXd pi = solver.solve(b);
  if (solver.info() != Eigen::Success) bad(ErrorKind::kInternal, "coupled stationary solve failed");

  CoupledStationary out;
  out.lo = spec.lo;
  out.hi = spec.hi;
  out.probs.assign(m * m, 0.0);
  out.reachable_states = states.size();
  for (std::size_t i = 0; i < states.size(); ++i) {
    out.probs[flat(states[i])] = pi(static_cast<Eigen::Index>(i));
  }
  // Balance residual max |(pi Q)(y)|.
  std::vector<double> flux(states.size(), 0.0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    moves.clear();
    coupled_moves(first, second, states[i], moves);
    const double p = pi(static_cast<Eigen::Index>(i));
    for (const auto& mv : moves) {
      flux[index[flat(mv.to)]] += p * mv.rate;
      flux[i] -= p * mv.rate;
    }
  }
  for (double f : flux) out.residual = std::max(out.residual, std::abs(f));
  return out;
}

CoupledBDModel::CoupledBDModel(CoupledBDSpec spec)
    : first_((validate(spec), bd_generator(spec.first()))), second_(bd_generator(spec.second())) {}

void CoupledBDModel::moves(const State& s, std::vector<Move>& out) const {
  coupled_moves(first_, second_, s, out);
}

CoupledBDRun coupled_bd_simulate(const CoupledBDSpec& spec, BDPair start,
                                 const SimulationOptions& options) {
  validate(spec);
  if (start.k < spec.lo || start.k2 > spec.hi || start.k > start.k2) {
    bad(ErrorKind::kInvalidInput, "coupled start must satisfy lo <= k <= k2 <= hi");
  }
  CoupledBDRun run;
  run.trace = simulate_ctmc(CoupledBDModel(spec), start, options,
                            [&](const BDPair& s, double, double) {
                              if (s.k > s.k2) ++run.order_violations;
                            });
  if (run.trace.event_cap_hit && run.trace.final_state.k > run.trace.final_state.k2) {
    ++run.order_violations;
  }
  return run;
}

// ---------------------------------------------------------------------------

double ZeroRangeSpec::g(std::size_t site, int occupancy) const {
  const auto& table = rate.at(site);
  if (occupancy < 0) bad(ErrorKind::kInvalidInput, "negative occupancy");
  if (static_cast<std::size_t>(occupancy) >= table.size()) {
    bad(ErrorKind::kInvalidInput, "rate table of site " + std::to_string(site) +
                                      " does not cover occupancy " + std::to_string(occupancy));
  }
  return table[static_cast<std::size_t>(occupancy)];
}

bool ZeroRangeSpec::monotone() const {
  for (const auto& table : rate) {
    for (std::size_t z = 1; z < table.size(); ++z) {
      if (table[z] < table[z - 1] * (1.0 - kRateTieTolerance)) return false;
    }
  }
  return true;
}

void validate(const ZeroRangeSpec& spec) {
  if (spec.sites() == 0) bad(ErrorKind::kInvalidInput, "zero-range system needs at least one site");
  if (spec.rate.size() != spec.sites()) {
    bad(ErrorKind::kInvalidInput, "one rate table per site is required");
  }
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    const auto& table = spec.rate[i];
    if (spec.capacity[i] < 0) bad(ErrorKind::kInvalidInput, "negative capacity");
    if (table.empty() || table[0] != 0.0) {
      bad(ErrorKind::kInvalidInput, "rate table must start with g(0) = 0");
    }
    if (spec.capacity[i] != kUnboundedCapacity &&
        table.size() < static_cast<std::size_t>(spec.capacity[i]) + 1) {
      bad(ErrorKind::kInvalidInput, "rate table shorter than capacity at site " + std::to_string(i));
    }
    for (double r : table) {
      if (!(r >= 0.0) || !std::isfinite(r)) {
        bad(ErrorKind::kInvalidInput, "rates must be finite and nonnegative");
      }
    }
  }
}

ZeroRangeSpec zero_range_from_family(const Family& family, std::size_t n) {
  if (n == 0) bad(ErrorKind::kInvalidParameter, "need at least one site");
  ZeroRangeSpec spec;
  for (std::size_t i = 0; i < n; ++i) {
    const Pmf& member = family.member(i);
    spec.capacity.push_back(member.last_positive());
    spec.rate.push_back(jump_rates_from_pmf(member));
  }
  validate(spec);
  return spec;
}

std::vector<ZrMove> zr_generator(const ZeroRangeSpec& spec, const Configuration& x) {
  check_configuration(spec, x, "zr_generator");
  std::vector<ZrMove> out;
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    if (x[i] == 0) continue;
    const double g = spec.g(i, x[i]);
    if (!(g > 0.0)) continue;
    for (std::size_t j = 0; j < spec.sites(); ++j) {
      if (j != i && x[j] < spec.capacity[j]) out.push_back({i, j, g});
    }
  }
  return out;
}

std::vector<CoupledZrMove> basic_coupling_step_rates(const ZeroRangeSpec& spec,
                                                     const Configuration& x,
                                                     const Configuration& xp) {
  check_configuration(spec, x, "basic coupling");
  check_configuration(spec, xp, "basic coupling");
  std::vector<CoupledZrMove> out;
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    const double gx = x[i] > 0 ? spec.g(i, x[i]) : 0.0;
    const double gy = xp[i] > 0 ? spec.g(i, xp[i]) : 0.0;
    if (gx <= 0.0 && gy <= 0.0) continue;
    double both = std::min(gx, gy);
    double excess = gy - gx;
    // ratios of log-domain masses carry round-off; equal rates stay equal
    if (std::abs(excess) <= kRateTieTolerance * std::max(gx, gy)) {
      both = std::max(gx, gy);
      excess = 0.0;
    }
    for (std::size_t j = 0; j < spec.sites(); ++j) {
      if (j == i) continue;
      const bool free_x = x[j] < spec.capacity[j];
      const bool free_y = xp[j] < spec.capacity[j];
      auto push = [&](bool first, bool second, double rate, int clause) {
        if (rate > 0.0) out.push_back({i, j, first, second, rate, clause});
      };
      if (free_x && free_y) push(true, true, both, 1);
      if (!free_x && free_y) push(false, true, both, 2);
      if (free_x && !free_y) push(true, false, both, 3);
      if (free_y) push(false, true, excess, 4);
      if (free_x) push(true, false, -excess, 5);
    }
  }
  return out;
}

void ZeroRangeModel::moves(const State& x, std::vector<Move>& out) const {
  for (std::size_t i = 0; i < spec_.sites(); ++i) {
    if (x[i] == 0) continue;
    const double g = spec_.g(i, x[i]);
    if (!(g > 0.0)) continue;
    for (std::size_t j = 0; j < spec_.sites(); ++j) {
      if (j != i && x[j] < spec_.capacity[j]) out.push_back({i, j, g});
    }
  }
}

void BasicCouplingModel::moves(const State& s, std::vector<Move>& out) const {
  const auto rates = basic_coupling_step_rates(spec_, s.first, s.second);
  out.insert(out.end(), rates.begin(), rates.end());
}

void BasicCouplingModel::apply(State& s, const Move& m) const {
  if (m.moves_first) {
    --s.first[m.from];
    ++s.first[m.to];
  }
  if (m.moves_second) {
    --s.second[m.from];
    ++s.second[m.to];
  }
}

CoupledZrRun coupled_zr_simulate(const ZeroRangeSpec& spec, Configuration x0, Configuration x0p,
                                 const SimulationOptions& options, bool allow_nonmonotone,
                                 const ZrPairObserver& observer) {
  validate(spec);
  check_configuration(spec, x0, "coupled_zr_simulate");
  check_configuration(spec, x0p, "coupled_zr_simulate");
  if (!leq(x0, x0p)) bad(ErrorKind::kInvalidInput, "initial configurations must satisfy x0 <= x0'");
  if (!spec.monotone() && !allow_nonmonotone) {
    bad(ErrorKind::kMonotonicityUnavailable,
        "rate functions are not nondecreasing; the basic coupling need not preserve order");
  }
  CoupledZrRun run;
  run.trace = simulate_ctmc(BasicCouplingModel(spec), ZrPair{std::move(x0), std::move(x0p)},
                            options, [&](const ZrPair& s, double start, double duration) {
                              if (!leq(s.first, s.second)) ++run.order_violations;
                              if (observer) observer(s, start, duration);
                            });
  if (run.trace.event_cap_hit && !leq(run.trace.final_state.first, run.trace.final_state.second)) {
    ++run.order_violations;
  }
  return run;
}

}  // namespace gibbslab
