#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "gibbslab/error.hpp"

namespace gibbslab {

// Closed integer interval [lo, hi]; either end may be unbounded.
class Interval {
 public:
  static constexpr std::int64_t kNegInfinity = std::numeric_limits<std::int64_t>::min();
  static constexpr std::int64_t kPosInfinity = std::numeric_limits<std::int64_t>::max();

  Interval() = default;

  static Interval all() { return {}; }
  static Interval point(std::int64_t k) { return Interval(k, k); }
  static Interval between(std::int64_t lo, std::int64_t hi) { return Interval(lo, hi); }
  static Interval at_least(std::int64_t lo) { return Interval(lo, kPosInfinity); }
  static Interval at_most(std::int64_t hi) { return Interval(kNegInfinity, hi); }

  // {k : k > r}. Integral r excludes r itself.
  static Interval above(double r);
  // {k : k < r}. Integral r excludes r itself.
  static Interval below(double r);

  std::int64_t lo() const noexcept { return lo_; }
  std::int64_t hi() const noexcept { return hi_; }
  bool bounded_below() const noexcept { return lo_ != kNegInfinity; }
  bool bounded_above() const noexcept { return hi_ != kPosInfinity; }
  bool empty() const noexcept { return lo_ > hi_; }
  bool contains(std::int64_t k) const noexcept { return k >= lo_ && k <= hi_; }

  // Interval shifted left by s, i.e. {k - s : k in this}.
  Interval shifted_down(std::int64_t s) const;

  std::string to_string() const;

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  Interval(std::int64_t lo, std::int64_t hi) : lo_(lo), hi_(hi) {}

  std::int64_t lo_ = kNegInfinity;
  std::int64_t hi_ = kPosInfinity;
};

// Raised when conditioning on an event of zero probability.
class EmptyConditionError : public Error {
 public:
  EmptyConditionError(const Interval& interval, double available_mass);

  const Interval& interval() const noexcept { return interval_; }
  double available_mass() const noexcept { return available_mass_; }

 private:
  Interval interval_;
  double available_mass_;
};

}  // namespace gibbslab
