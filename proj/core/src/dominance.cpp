#include "gibbslab/dominance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "gibbslab/error.hpp"

namespace gibbslab {

namespace {

// Residual capacities below this are treated as exhausted.
constexpr double kResidualEps = 1e-16;
// Stands in for an uncapacitated arc; total flow never exceeds 1.
constexpr double kUnbounded = 4.0;
constexpr std::size_t kBipartitePairLimit = 4'000'000;

// Dinic's algorithm on real capacities.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : adjacency_(nodes), level_(nodes), next_(nodes) {}

  std::size_t add_edge(std::size_t from, std::size_t to, double cap) {
    const std::size_t id = edges_.size();
    edges_.push_back({to, cap, cap});
    edges_.push_back({from, 0.0, 0.0});
    adjacency_[from].push_back(id);
    adjacency_[to].push_back(id + 1);
    return id;
  }

  double run(std::size_t source, std::size_t sink) {
    double total = 0.0;
    while (build_levels(source, sink)) {
      std::fill(next_.begin(), next_.end(), 0);
      while (true) {
        const double pushed = augment(source, sink, kUnbounded);
        if (pushed <= 0.0) break;
        total += pushed;
      }
    }
    return total;
  }

  double flow(std::size_t edge) const { return edges_[edge].cap - edges_[edge].residual; }
  std::size_t target(std::size_t edge) const { return edges_[edge].to; }
  std::span<const std::size_t> out_edges(std::size_t node) const { return adjacency_[node]; }
  bool is_forward(std::size_t edge) const { return edge % 2 == 0; }

  std::vector<char> residual_reachable(std::size_t source) const {
    std::vector<char> seen(adjacency_.size(), 0);
    std::vector<std::size_t> stack{source};
    seen[source] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t e : adjacency_[u]) {
        const std::size_t v = edges_[e].to;
        if (!seen[v] && edges_[e].residual > kResidualEps) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return seen;
  }

 private:
  struct Edge {
    std::size_t to;
    double cap;
    double residual;
  };

  bool build_levels(std::size_t source, std::size_t sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> queue;
    level_[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop();
      for (std::size_t e : adjacency_[u]) {
        const std::size_t v = edges_[e].to;
        if (level_[v] < 0 && edges_[e].residual > kResidualEps) {
          level_[v] = level_[u] + 1;
          queue.push(v);
        }
      }
    }
    return level_[sink] >= 0;
  }

  double augment(std::size_t u, std::size_t sink, double limit) {
    if (u == sink) return limit;
    for (std::size_t& i = next_[u]; i < adjacency_[u].size(); ++i) {
      const std::size_t e = adjacency_[u][i];
      Edge& edge = edges_[e];
      if (edge.residual <= kResidualEps || level_[edge.to] != level_[u] + 1) continue;
      const double pushed = augment(edge.to, sink, std::min(limit, edge.residual));
      if (pushed > 0.0) {
        edge.residual -= pushed;
        edges_[e ^ 1].residual += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
};

bool leq(const Configuration& a, const Configuration& b) {
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (a[c] > b[c]) return false;
  }
  return true;
}

// Up-closure of `seed` inside the box, together with its minimal elements.
UpSetCertificate up_set_certificate(const JointTable& lower, const JointTable& upper,
                                    std::vector<char> in_set) {
  const auto dims = lower.dims();
  // Flat order is a linear extension of the coordinatewise order.
  for_each_configuration(dims, [&](std::size_t flat, const Configuration& x) {
    if (!in_set[flat]) return;
    Configuration y = x;
    for (std::size_t c = 0; c < y.size(); ++c) {
      if (y[c] + 1 < dims[c]) {
        ++y[c];
        in_set[lower.flat_index(y)] = 1;
        --y[c];
      }
    }
  });
  UpSetCertificate cert;
  for_each_configuration(dims, [&](std::size_t flat, const Configuration& x) {
    if (!in_set[flat]) return;
    cert.members.push_back(flat);
    cert.lower_mass += lower.prob(flat);
    cert.upper_mass += upper.prob(flat);
    Configuration y = x;
    bool minimal = true;
    for (std::size_t c = 0; c < y.size() && minimal; ++c) {
      if (y[c] > 0) {
        --y[c];
        if (in_set[lower.flat_index(y)]) minimal = false;
        ++y[c];
      }
    }
    if (minimal) cert.generators.push_back(x);
  });
  return cert;
}

std::vector<std::size_t> support(const JointTable& t) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.log_prob(i) != kLogZero) out.push_back(i);
  }
  return out;
}

DominanceResult finish(DominanceResult result, std::vector<CouplingEntry> witness,
                       const JointTable& lower, const JointTable& upper,
                       std::vector<char> cut_side) {
  result.holds = result.flow >= 1.0 - kDominanceTolerance;
  if (result.holds) {
    result.witness_coupling = std::move(witness);
  } else {
    result.violation_certificate = up_set_certificate(lower, upper, std::move(cut_side));
  }
  return result;
}

DominanceResult solve_bipartite(const JointTable& lower, const JointTable& upper) {
  const auto left = support(lower);
  const auto right = support(upper);
  const std::size_t source = 0;
  const std::size_t sink = 1;
  const std::size_t left_base = 2;
  const std::size_t right_base = left_base + left.size();
  MaxFlow graph(right_base + right.size());

  std::vector<Configuration> right_configs;
  right_configs.reserve(right.size());
  for (std::size_t r : right) right_configs.push_back(upper.config(r));

  for (std::size_t a = 0; a < left.size(); ++a) graph.add_edge(source, left_base + a, lower.prob(left[a]));
  for (std::size_t b = 0; b < right.size(); ++b) graph.add_edge(right_base + b, sink, upper.prob(right[b]));

  struct PairEdge {
    std::size_t edge, from, to;
  };
  std::vector<PairEdge> pairs;
  for (std::size_t a = 0; a < left.size(); ++a) {
    const Configuration x = lower.config(left[a]);
    for (std::size_t b = 0; b < right.size(); ++b) {
      if (leq(x, right_configs[b])) {
        pairs.push_back({graph.add_edge(left_base + a, right_base + b, kUnbounded), left[a], right[b]});
      }
    }
  }

  DominanceResult result;
  result.flow = graph.run(source, sink);
  std::vector<CouplingEntry> witness;
  for (const auto& p : pairs) {
    const double f = graph.flow(p.edge);
    if (f > 0.0) witness.push_back({p.from, p.to, f});
  }
  const auto reach = graph.residual_reachable(source);
  std::vector<char> cut_side(lower.size(), 0);
  for (std::size_t a = 0; a < left.size(); ++a) {
    if (reach[left_base + a]) cut_side[left[a]] = 1;
  }
  return finish(std::move(result), std::move(witness), lower, upper, std::move(cut_side));
}

DominanceResult solve_lattice(const JointTable& lower, const JointTable& upper) {
  const std::size_t n = lower.size();
  const std::size_t source = n;
  const std::size_t sink = n + 1;
  MaxFlow graph(n + 2);
  const auto dims = lower.dims();
  for (std::size_t flat = 0; flat < n; ++flat) {
    if (lower.log_prob(flat) != kLogZero) graph.add_edge(source, flat, lower.prob(flat));
  }
  for (std::size_t flat = 0; flat < n; ++flat) {
    if (upper.log_prob(flat) != kLogZero) graph.add_edge(flat, sink, upper.prob(flat));
  }
  for_each_configuration(dims, [&](std::size_t flat, const Configuration& x) {
    Configuration y = x;
    for (std::size_t c = 0; c < y.size(); ++c) {
      if (y[c] + 1 < dims[c]) {
        ++y[c];
        graph.add_edge(flat, lower.flat_index(y), kUnbounded);
        --y[c];
      }
    }
  });

  DominanceResult result;
  result.flow = graph.run(source, sink);

  // Path decomposition of the flow; the lattice is acyclic, so every path
  // from the source ends at the sink.
  std::map<std::pair<std::size_t, std::size_t>, double> parcels;
  {
    // Flow still to be assigned to paths, indexed by edge id.
    std::vector<double> edge_flow;
    std::size_t max_edge = 0;
    for (std::size_t u = 0; u < n + 2; ++u) {
      for (std::size_t e : graph.out_edges(u)) max_edge = std::max(max_edge, e);
    }
    edge_flow.assign(max_edge + 1, 0.0);
    for (std::size_t u = 0; u < n + 2; ++u) {
      for (std::size_t e : graph.out_edges(u)) {
        if (graph.is_forward(e)) edge_flow[e] = std::max(0.0, graph.flow(e));
      }
    }
    std::vector<std::size_t> cursor(n + 2, 0);
    for (std::size_t e0 : graph.out_edges(source)) {
      if (!graph.is_forward(e0)) continue;
      const std::size_t origin = graph.target(e0);
      while (edge_flow[e0] > kResidualEps) {
        std::vector<std::size_t> path{e0};
        std::size_t u = origin;
        double bottleneck = edge_flow[e0];
        while (u != sink) {
          auto out = graph.out_edges(u);
          std::size_t& i = cursor[u];
          while (i < out.size() && (!graph.is_forward(out[i]) || edge_flow[out[i]] <= kResidualEps)) ++i;
          if (i == out.size()) break;
          const std::size_t e = out[i];
          path.push_back(e);
          bottleneck = std::min(bottleneck, edge_flow[e]);
          u = graph.target(e);
        }
        if (u != sink) {
          // Unroutable residue from floating-point round-off.
          edge_flow[e0] = 0.0;
          break;
        }
        for (std::size_t e : path) edge_flow[e] -= bottleneck;
        // The last edge enters the sink; the one before it ends at the destination.
        const std::size_t destination = graph.target(path[path.size() - 2]);
        parcels[{origin, destination}] += bottleneck;
      }
    }
  }
  std::vector<CouplingEntry> witness;
  for (const auto& [key, mass] : parcels) witness.push_back({key.first, key.second, mass});

  const auto reach = graph.residual_reachable(source);
  std::vector<char> cut_side(reach.begin(), reach.begin() + static_cast<std::ptrdiff_t>(n));
  return finish(std::move(result), std::move(witness), lower, upper, std::move(cut_side));
}

double total_mass(const JointTable& t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) acc += t.prob(i);
  return acc;
}

}  // namespace

DominanceResult stochastic_dominance(const JointTable& lower, const JointTable& upper,
                                     DominanceNetwork network) {
  if (!std::equal(lower.dims().begin(), lower.dims().end(), upper.dims().begin(),
                  upper.dims().end())) {
    throw Error(ErrorKind::kInvalidInput, "stochastic_dominance: tables have different dims");
  }
  if (std::abs(total_mass(lower) - 1.0) > kDominanceTolerance ||
      std::abs(total_mass(upper) - 1.0) > kDominanceTolerance) {
    throw Error(ErrorKind::kInvalidInput, "stochastic_dominance: tables must be normalized");
  }
  if (network == DominanceNetwork::kAuto) {
    std::size_t left = 0;
    std::size_t right = 0;
    for (std::size_t i = 0; i < lower.size(); ++i) {
      left += lower.log_prob(i) != kLogZero;
      right += upper.log_prob(i) != kLogZero;
    }
    network = left * right <= kBipartitePairLimit ? DominanceNetwork::kBipartite
                                                   : DominanceNetwork::kLattice;
  }
  return network == DominanceNetwork::kBipartite ? solve_bipartite(lower, upper)
                                                 : solve_lattice(lower, upper);
}

bool cdf_dominated(const Pmf& lower, const Pmf& upper, double tolerance) {
  const int top = std::max(lower.support_max(), upper.support_max());
  double cdf_lower = 0.0;
  double cdf_upper = 0.0;
  for (int x = 0; x <= top; ++x) {
    cdf_lower += lower.prob(x);
    cdf_upper += upper.prob(x);
    if (cdf_upper > cdf_lower + tolerance) return false;
  }
  return true;
}

}  // namespace gibbslab
