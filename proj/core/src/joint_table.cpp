#include "gibbslab/joint_table.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gibbslab/error.hpp"

namespace gibbslab {

JointTable::JointTable(std::vector<int> dims, std::vector<double> log_probs)
    : dims_(std::move(dims)), log_probs_(std::move(log_probs)) {
  std::size_t total = 1;
  for (int d : dims_) {
    if (d <= 0) throw Error(ErrorKind::kInvalidInput, "joint table dims must be positive");
    total *= static_cast<std::size_t>(d);
  }
  if (total != log_probs_.size()) {
    throw Error(ErrorKind::kInvalidInput, "joint table size does not match dims");
  }
  strides_.assign(dims_.size(), 1);
  for (std::size_t c = dims_.size(); c-- > 1;) {
    strides_[c - 1] = strides_[c] * static_cast<std::size_t>(dims_[c]);
  }
}

std::size_t JointTable::checked_size(std::span<const int> dims, std::size_t cap) {
  std::size_t total = 1;
  for (int d : dims) {
    if (d <= 0) throw Error(ErrorKind::kInvalidInput, "joint table dims must be positive");
    if (total > cap / static_cast<std::size_t>(d)) {
      throw Error(ErrorKind::kInstanceTooLarge,
                  "dense table exceeds the configuration cap of " + std::to_string(cap));
    }
    total *= static_cast<std::size_t>(d);
  }
  return total;
}

double JointTable::prob(std::size_t flat) const noexcept {
  const double lp = log_probs_[flat];
  return lp == kLogZero ? 0.0 : std::exp(lp);
}

double JointTable::prob(std::span<const int> config) const {
  if (!in_box(config)) return 0.0;
  return prob(flat_index(config));
}

std::vector<double> JointTable::probs() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = prob(i);
  return out;
}

Configuration JointTable::config(std::size_t flat) const {
  Configuration x(dims_.size());
  for (std::size_t c = 0; c < dims_.size(); ++c) {
    x[c] = static_cast<int>(flat / strides_[c]);
    flat %= strides_[c];
  }
  return x;
}

std::size_t JointTable::flat_index(std::span<const int> config) const {
  if (config.size() != dims_.size()) {
    throw Error(ErrorKind::kInvalidInput, "configuration rank does not match table");
  }
  std::size_t flat = 0;
  for (std::size_t c = 0; c < dims_.size(); ++c) {
    flat += static_cast<std::size_t>(config[c]) * strides_[c];
  }
  return flat;
}

bool JointTable::in_box(std::span<const int> config) const noexcept {
  if (config.size() != dims_.size()) return false;
  for (std::size_t c = 0; c < dims_.size(); ++c) {
    if (config[c] < 0 || config[c] >= dims_[c]) return false;
  }
  return true;
}

Pmf JointTable::marginal(std::size_t coord) const {
  if (coord >= dims_.size()) throw Error(ErrorKind::kInvalidInput, "marginal: bad coordinate");
  std::vector<std::vector<double>> buckets(static_cast<std::size_t>(dims_[coord]));
  for_each_configuration(dims_, [&](std::size_t flat, const Configuration& x) {
    if (log_probs_[flat] != kLogZero) buckets[x[coord]].push_back(log_probs_[flat]);
  });
  std::vector<double> lw(buckets.size());
  for (std::size_t v = 0; v < buckets.size(); ++v) lw[v] = log_sum_exp(buckets[v]);
  return Pmf::from_log_weights(std::move(lw));
}

JointTable JointTable::embed(std::vector<int> dims) const {
  if (dims.size() != dims_.size()) throw Error(ErrorKind::kInvalidInput, "embed: rank mismatch");
  for (std::size_t c = 0; c < dims.size(); ++c) {
    if (dims[c] < dims_[c]) throw Error(ErrorKind::kInvalidInput, "embed: box must not shrink");
  }
  std::vector<double> lp(checked_size(dims, std::numeric_limits<std::size_t>::max()), kLogZero);
  JointTable out(std::move(dims), std::move(lp));
  for_each_configuration(dims_, [&](std::size_t flat, const Configuration& x) {
    out.log_probs_[out.flat_index(x)] = log_probs_[flat];
  });
  return out;
}

double JointTable::normalize() {
  const double total = log_sum_exp(log_probs_);
  if (total == kLogZero) throw Error(ErrorKind::kInvalidDistribution, "joint table has zero mass");
  for (double& v : log_probs_) {
    if (v != kLogZero) v -= total;
  }
  return total;
}

JointTable product_table(std::span<const Pmf> marginals, std::size_t cap) {
  std::vector<int> dims;
  for (const auto& m : marginals) dims.push_back(m.support_max() + 1);
  std::vector<double> lp(JointTable::checked_size(dims, cap));
  for_each_configuration(dims, [&](std::size_t flat, const Configuration& x) {
    double acc = 0.0;
    for (std::size_t c = 0; c < x.size() && acc != kLogZero; ++c) {
      const double v = marginals[c].log_prob(x[c]);
      acc = v == kLogZero ? kLogZero : acc + v;
    }
    lp[flat] = acc;
  });
  return JointTable(std::move(dims), std::move(lp));
}

}  // namespace gibbslab
