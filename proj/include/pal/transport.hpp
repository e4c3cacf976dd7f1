#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "pal/lattice.hpp"

namespace pal {

struct FlowEntry {
  LatticePoint from;
  LatticePoint to;
  double mass = 0.0;
};

struct DistanceResult {
  double value = 0.0;
  /// Rigorous bound on |value - distance between the untruncated laws|.
  double truncation_error = 0.0;
  std::optional<std::vector<FlowEntry>> flow;
};

/// Which graph the exact solver runs on. Both give the same optimum; the
/// lattice graph (unit arcs between neighbours of a bounding box) is the
/// smaller problem when the supports are large and dense.
enum class TransportGraph { kAuto, kBipartite, kLattice };

struct TransportOptions {
  TransportGraph graph = TransportGraph::kAuto;
  bool want_flow = false;
  std::size_t arc_budget = 60'000'000;
};

/// Exact 1-norm Wasserstein distance between the (renormalised) stored atoms.
DistanceResult wasserstein_l1(const LatticePmf& p, const LatticePmf& q, const TransportOptions& opts = {});

/// Total variation distance, half the l1 distance between the stored masses.
DistanceResult total_variation(const LatticePmf& p, const LatticePmf& q);

/// Writes `x,y,mass` rows, lattice points as space-separated coordinates.
void write_flow_csv(std::ostream& os, const std::vector<FlowEntry>& flow);

}  // namespace pal
