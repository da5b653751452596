#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gibbslab/pmf.hpp"

namespace gibbslab {

// Default bound on the number of configurations in a dense table.
inline constexpr std::size_t kDefaultConfigurationCap = 2'000'000;

using Configuration = std::vector<int>;

// Dense joint law over a box {0..dims[0]-1} x ... x {0..dims[d-1]-1}, stored
// row-major (last coordinate fastest) in the log domain.
class JointTable {
 public:
  JointTable() = default;
  JointTable(std::vector<int> dims, std::vector<double> log_probs);

  // Product of dims; throws InstanceTooLarge above cap.
  static std::size_t checked_size(std::span<const int> dims,
                                  std::size_t cap = kDefaultConfigurationCap);

  std::span<const int> dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return dims_.size(); }
  std::size_t size() const noexcept { return log_probs_.size(); }

  std::span<const double> log_probs() const noexcept { return log_probs_; }
  double log_prob(std::size_t flat) const noexcept { return log_probs_[flat]; }
  double prob(std::size_t flat) const noexcept;
  double prob(std::span<const int> config) const;
  std::vector<double> probs() const;

  Configuration config(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> config) const;
  bool in_box(std::span<const int> config) const noexcept;

  // Law of one coordinate.
  Pmf marginal(std::size_t coord) const;

  // Same law on a larger box, zero outside the old one.
  JointTable embed(std::vector<int> dims) const;

  // Renormalizes in place; returns the log of the mass before normalization.
  double normalize();

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::vector<double> log_probs_;
};

// Calls fn(flat, config) for every configuration of the box, in flat order.
template <class Fn>
void for_each_configuration(std::span<const int> dims, Fn&& fn) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  Configuration x(dims.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    fn(flat, static_cast<const Configuration&>(x));
    for (std::size_t c = dims.size(); c-- > 0;) {
      if (++x[c] < dims[c]) break;
      x[c] = 0;
    }
  }
}

// Product law of the given pmfs on the box of their supports.
JointTable product_table(std::span<const Pmf> marginals, std::size_t cap = kDefaultConfigurationCap);

}  // namespace gibbslab
