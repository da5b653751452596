#include "gibbslab/interval.hpp"

#include <cmath>

namespace gibbslab {

Interval Interval::above(double r) {
  if (!std::isfinite(r)) {
    if (r < 0) return all();
    throw Error(ErrorKind::kInvalidParameter, "Interval::above: threshold must not be +inf");
  }
  return at_least(static_cast<std::int64_t>(std::floor(r)) + 1);
}

Interval Interval::below(double r) {
  if (!std::isfinite(r)) {
    if (r > 0) return all();
    throw Error(ErrorKind::kInvalidParameter, "Interval::below: threshold must not be -inf");
  }
  return at_most(static_cast<std::int64_t>(std::ceil(r)) - 1);
}

Interval Interval::shifted_down(std::int64_t s) const {
  Interval out = *this;
  if (bounded_below()) out.lo_ -= s;
  if (bounded_above()) out.hi_ -= s;
  return out;
}

std::string Interval::to_string() const {
  std::string lo = bounded_below() ? std::to_string(lo_) : "-inf";
  std::string hi = bounded_above() ? std::to_string(hi_) : "+inf";
  return "[" + lo + ", " + hi + "]";
}

EmptyConditionError::EmptyConditionError(const Interval& interval, double available_mass)
    : Error(ErrorKind::kEmptyCondition,
            "conditioning event " + interval.to_string() + " has zero mass (available mass " +
                std::to_string(available_mass) + ")"),
      interval_(interval),
      available_mass_(available_mass) {}

}  // namespace gibbslab
