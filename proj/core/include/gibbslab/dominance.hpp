#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gibbslab/joint_table.hpp"

namespace gibbslab {

// Max-flow values within this distance of 1 count as a feasible coupling.
inline constexpr double kDominanceTolerance = 1e-9;

// Mass moved from configuration `from` of the lower law to configuration `to`
// of the upper law (flat indices into the shared box).
struct CouplingEntry {
  std::size_t from = 0;
  std::size_t to = 0;
  double mass = 0.0;
};

// An up-set U of the box (closed under increasing any coordinate) with
// lower(U) > upper(U), which rules out an ordered coupling.
struct UpSetCertificate {
  std::vector<Configuration> generators;  // minimal elements of U
  std::vector<std::size_t> members;       // flat indices of U, increasing
  double lower_mass = 0.0;
  double upper_mass = 0.0;
};

struct DominanceResult {
  bool holds = false;
  double flow = 0.0;
  std::optional<std::vector<CouplingEntry>> witness_coupling;
  std::optional<UpSetCertificate> violation_certificate;
};

// Network used for the transportation problem.
//  - kBipartite: source -> x -> x' -> sink with an arc x -> x' for every
//    comparable pair of support points.
//  - kLattice: arcs only between neighbours x -> x + e_c of the box; the
//    order is the transitive closure of these arcs, so feasibility is the
//    same with far fewer arcs.
//  - kAuto: bipartite for small supports, lattice otherwise.
enum class DominanceNetwork { kAuto, kBipartite, kLattice };

// Decides lower ≺ upper (a coupling supported on {x <= x'} coordinatewise
// exists) by max-flow. Both tables must share dims and be normalized.
DominanceResult stochastic_dominance(const JointTable& lower, const JointTable& upper,
                                     DominanceNetwork network = DominanceNetwork::kAuto);

// One-dimensional order: CDF of lower >= CDF of upper everywhere.
bool cdf_dominated(const Pmf& lower, const Pmf& upper, double tolerance = kDominanceTolerance);

}  // namespace gibbslab
