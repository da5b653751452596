#pragma once

#include <climits>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "gibbslab/error.hpp"
#include "gibbslab/joint_table.hpp"
#include "gibbslab/pmf.hpp"

namespace gibbslab {

// ---------------------------------------------------------------------------
// Random streams

// Seedable, splittable generator: (seed, stream) pairs give independent,
// reproducible streams. Variates are derived from raw 64-bit draws so results
// do not depend on the standard library's distribution implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  // Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

  RngStream split(std::uint64_t child) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Exact-event simulation

inline constexpr std::size_t kDefaultEventCap = 10'000'000;

struct SimulationOptions {
  double t_end = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::size_t event_cap = kDefaultEventCap;
  bool record_trace = true;
};

template <class State>
struct CtmcTrace {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> times;  // times[0] = 0 holds the initial state
  std::vector<State> states;
  double terminal_time = 0.0;
  std::size_t events = 0;
  bool event_cap_hit = false;
  bool absorbed = false;
  State final_state{};
};

// A model provides
//   using State = ...; using Move = ...;   (Move has a `double rate`)
//   void moves(const State&, std::vector<Move>&) const;  // appends
//   void apply(State&, const Move&) const;
//
// on_hold(state, start, duration) is called for every holding interval,
// clipped at t_end. Holding times are exponential with the total exit rate;
// the jump is chosen with probability proportional to its rate.
template <class Model, class OnHold>
CtmcTrace<typename Model::State> simulate_ctmc(const Model& model, typename Model::State state,
                                                const SimulationOptions& options, OnHold&& on_hold) {
  if (!(options.t_end > 0.0)) {
    throw Error(ErrorKind::kInvalidParameter, "simulate_ctmc: t_end must be positive");
  }
  CtmcTrace<typename Model::State> trace;
  trace.seed = options.seed;
  trace.stream = options.stream;
  RngStream rng(options.seed, options.stream);
  std::vector<typename Model::Move> moves;
  double t = 0.0;
  if (options.record_trace) {
    trace.times.push_back(0.0);
    trace.states.push_back(state);
  }
  while (true) {
    moves.clear();
    model.moves(state, moves);
    double total = 0.0;
    for (const auto& m : moves) total += m.rate;
    if (!(total > 0.0)) {
      trace.absorbed = true;
      if (std::isfinite(options.t_end)) {
        on_hold(static_cast<const typename Model::State&>(state), t, options.t_end - t);
        t = options.t_end;
      }
      break;
    }
    const double dt = rng.exponential(total);
    if (t + dt >= options.t_end) {
      on_hold(static_cast<const typename Model::State&>(state), t, options.t_end - t);
      t = options.t_end;
      break;
    }
    if (trace.events >= options.event_cap) {
      trace.event_cap_hit = true;
      break;
    }
    on_hold(static_cast<const typename Model::State&>(state), t, dt);
    const double next_t = t + dt;
    t = next_t > t ? next_t : std::nextafter(t, INFINITY);
    double target = rng.uniform() * total;
    std::size_t pick = 0;
    for (; pick + 1 < moves.size(); ++pick) {
      if (target < moves[pick].rate) break;
      target -= moves[pick].rate;
    }
    // Skip zero-rate entries that round-off could land on.
    while (moves[pick].rate <= 0.0 && pick > 0) --pick;
    model.apply(state, moves[pick]);
    ++trace.events;
    if (options.record_trace) {
      trace.times.push_back(t);
      trace.states.push_back(state);
    }
  }
  trace.terminal_time = t;
  trace.final_state = std::move(state);
  return trace;
}

template <class Model>
CtmcTrace<typename Model::State> simulate_ctmc(const Model& model, typename Model::State state,
                                                const SimulationOptions& options) {
  return simulate_ctmc(model, std::move(state), options, [](const auto&, double, double) {});
}

// Finite-state chain given by explicit rates; states are 0..size-1.
class GeneratorModel {
 public:
  using State = int;
  struct Move {
    int to;
    double rate;
  };

  explicit GeneratorModel(std::vector<std::vector<double>> rates);

  void moves(const State& s, std::vector<Move>& out) const;
  void apply(State& s, const Move& m) const { s = m.to; }
  std::size_t size() const noexcept { return rates_.size(); }

 private:
  std::vector<std::vector<double>> rates_;
};

// Time-weighted occupation of a finite set of categories, with batch-means
// standard errors over equal-length time batches.
class OccupationEstimator {
 public:
  OccupationEstimator(std::size_t categories, double horizon, std::size_t batches = 50);

  void add(std::size_t category, double start, double duration);

  std::vector<double> fractions() const;
  std::vector<double> standard_errors() const;
  std::size_t batches() const noexcept { return batches_; }

 private:
  std::size_t categories_;
  double horizon_;
  std::size_t batches_;
  std::vector<double> time_;  // batches_ x categories_
};

// ---------------------------------------------------------------------------
// Birth-death chain constrained to an interval

struct BirthDeathSpec {
  Pmf base_law;
  double lambda = 1.0;
  int lo = 0;
  int hi = 0;
};

void validate(const BirthDeathSpec& spec);

// Birth rate lambda, death rate pi(k-1)/pi(k); rates leaving I are zero.
struct BirthDeathRates {
  int lo = 0;
  int hi = 0;
  std::vector<double> birth;  // index k - lo
  std::vector<double> death;

  double up(int k) const { return birth.at(static_cast<std::size_t>(k - lo)); }
  double down(int k) const { return death.at(static_cast<std::size_t>(k - lo)); }
};

BirthDeathRates bd_generator(const BirthDeathSpec& spec);

// Stationary law on I from detailed balance, as a Pmf on 0..hi.
Pmf bd_stationary(const BirthDeathSpec& spec);

class BirthDeathModel {
 public:
  using State = int;
  struct Move {
    int delta;
    double rate;
  };

  explicit BirthDeathModel(BirthDeathRates rates) : rates_(std::move(rates)) {}

  void moves(const State& k, std::vector<Move>& out) const;
  void apply(State& k, const Move& m) const { k += m.delta; }

 private:
  BirthDeathRates rates_;
};

// Two constrained chains with shared base law and interval, lambda <= lambda2.
struct CoupledBDSpec {
  Pmf base_law;
  double lambda = 1.0;
  double lambda2 = 1.0;
  int lo = 0;
  int hi = 0;

  BirthDeathSpec first() const { return {base_law, lambda, lo, hi}; }
  BirthDeathSpec second() const { return {base_law, lambda2, lo, hi}; }
};

void validate(const CoupledBDSpec& spec);

struct BDPair {
  int k = 0;
  int k2 = 0;
  friend bool operator==(const BDPair&, const BDPair&) = default;
};

// One clause of the coupled rate table. Clauses 1-3 act on the diagonal
// (joint birth, lone birth of the second chain, joint death); clauses 4-7 are
// independent moves off the diagonal (first birth, second birth, second
// death, first death).
struct CoupledRate {
  BDPair from;
  BDPair to;
  double rate = 0.0;
  int clause = 0;
};

std::vector<CoupledRate> coupled_bd_transitions(const CoupledBDSpec& spec, BDPair state);

struct CoupledBDGenerator {
  int lo = 0;
  int hi = 0;
  std::vector<CoupledRate> rates;  // all positive-rate clauses on I x I
};

CoupledBDGenerator coupled_bd_generator(const CoupledBDSpec& spec);

inline constexpr int kDefaultCoupledSolveSide = 400;

struct CoupledStationary {
  int lo = 0;
  int hi = 0;
  std::vector<double> probs;  // row-major over (k - lo, k2 - lo)
  std::size_t reachable_states = 0;
  double residual = 0.0;  // max |pi Q| over the class

  int side() const noexcept { return hi - lo + 1; }
  double prob(int k, int k2) const;
  // Mass on {k > k2}.
  double unordered_mass() const;
  Pmf first_marginal() const;
  Pmf second_marginal() const;
};

// Solves global balance (sparse LU) on the communicating class of (lo, lo),
// found by search over the positive-rate clauses. States outside the class
// carry zero mass.
CoupledStationary coupled_bd_stationary(const CoupledBDSpec& spec,
                                        int max_side = kDefaultCoupledSolveSide);

class CoupledBDModel {
 public:
  using State = BDPair;
  using Move = CoupledRate;

  explicit CoupledBDModel(CoupledBDSpec spec);

  void moves(const State& s, std::vector<Move>& out) const;
  void apply(State& s, const Move& m) const { s = m.to; }

 private:
  BirthDeathRates first_;
  BirthDeathRates second_;
};

struct CoupledBDRun {
  CtmcTrace<BDPair> trace;
  std::size_t order_violations = 0;
};

// Simulates the coupling from an ordered start and counts states with k > k2.
CoupledBDRun coupled_bd_simulate(const CoupledBDSpec& spec, BDPair start,
                                 const SimulationOptions& options);

// ---------------------------------------------------------------------------
// Zero-range / misanthrope particle systems

inline constexpr int kUnboundedCapacity = INT_MAX;

// Rates within this relative distance count as equal, both in the
// monotonicity check and in the coupling's excess clauses.
inline constexpr double kRateTieTolerance = 1e-12;

struct ZeroRangeSpec {
  std::vector<int> capacity;             // max_i per site
  std::vector<std::vector<double>> rate;  // g_i(z) for z = 0..rate[i].size()-1

  std::size_t sites() const noexcept { return capacity.size(); }
  double g(std::size_t site, int occupancy) const;
  // g_i nondecreasing over its table, up to kRateTieTolerance.
  bool monotone() const;
};

void validate(const ZeroRangeSpec& spec);

// Sites 0..n-1 with capacity max_i (the last positive index of nu_i) and
// rates g_i(z) = nu_i(z-1)/nu_i(z). For truncated infinite-support members
// the truncation point stands in for max_i.
ZeroRangeSpec zero_range_from_family(const Family& family, std::size_t n);

struct ZrMove {
  std::size_t from = 0;
  std::size_t to = 0;
  double rate = 0.0;
};

// All particle jumps i -> j out of x with positive rate g_i(x_i), x_j < max_j.
std::vector<ZrMove> zr_generator(const ZeroRangeSpec& spec, const Configuration& x);

struct ZrPair {
  Configuration first;
  Configuration second;
  friend bool operator==(const ZrPair&, const ZrPair&) = default;
};

// One clause of the basic coupling, for a particle jump i -> j:
//   1 joint move at g(x_i) ∧ g(x'_i), both destinations free
//   2 second alone at g(x_i) ∧ g(x'_i), first destination full
//   3 first alone at g(x_i) ∧ g(x'_i), second destination full
//   4 second alone at (g(x'_i) - g(x_i))^+, second destination free
//   5 first alone at (g(x_i) - g(x'_i))^+, first destination free
struct CoupledZrMove {
  std::size_t from = 0;
  std::size_t to = 0;
  bool moves_first = false;
  bool moves_second = false;
  double rate = 0.0;
  int clause = 0;
};

std::vector<CoupledZrMove> basic_coupling_step_rates(const ZeroRangeSpec& spec,
                                                     const Configuration& x,
                                                     const Configuration& xp);

class ZeroRangeModel {
 public:
  using State = Configuration;
  using Move = ZrMove;

  explicit ZeroRangeModel(ZeroRangeSpec spec) : spec_(std::move(spec)) {}

  void moves(const State& x, std::vector<Move>& out) const;
  void apply(State& x, const Move& m) const {
    --x[m.from];
    ++x[m.to];
  }

 private:
  ZeroRangeSpec spec_;
};

class BasicCouplingModel {
 public:
  using State = ZrPair;
  using Move = CoupledZrMove;

  explicit BasicCouplingModel(ZeroRangeSpec spec) : spec_(std::move(spec)) {}

  void moves(const State& s, std::vector<Move>& out) const;
  void apply(State& s, const Move& m) const;

 private:
  ZeroRangeSpec spec_;
};

struct CoupledZrRun {
  CtmcTrace<ZrPair> trace;
  std::size_t order_violations = 0;
};

using ZrPairObserver = std::function<void(const ZrPair&, double start, double duration)>;

// Simulates the basic coupling from x0 <= x0p, checking the coordinatewise
// order after every event. Requires nondecreasing rates unless
// allow_nonmonotone is set (MonotonicityUnavailable otherwise).
CoupledZrRun coupled_zr_simulate(const ZeroRangeSpec& spec, Configuration x0, Configuration x0p,
                                 const SimulationOptions& options, bool allow_nonmonotone = false,
                                 const ZrPairObserver& observer = {});

}  // namespace gibbslab
