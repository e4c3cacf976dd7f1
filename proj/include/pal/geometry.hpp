#pragma once

#include <span>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pal/lattice.hpp"

namespace pal {

/// Location in R^w; on a finite label space a point is the one-vector {label}.
using Point = std::vector<double>;

/// Half-open box [lo, hi).
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  bool contains(std::span<const double> x) const;
  void validate() const;
  static Box unit(int dim);
};

/// Volume of the intersection of two boxes of equal dimension.
double overlap_volume(const Box& a, const Box& b);

/// Finite label space {0, ..., size-1} with counting reference measure.
struct LabelSpace {
  int size = 1;
};

struct LabelSet {
  std::vector<int> labels;  // sorted, distinct
  bool contains(std::span<const double> x) const;
};

using Window = std::variant<Box, LabelSpace>;
using Region = std::variant<Box, LabelSet>;

bool region_contains(const Region& r, std::span<const double> x);

/// Finite counting measure; repeated points are allowed.
struct PointPattern {
  std::vector<Point> points;
  std::size_t size() const { return points.size(); }
};

/// Tuple of pairwise disjoint sets (A_1, ..., A_d).
struct PartitionSpec {
  std::vector<Region> sets;

  int dim() const { return static_cast<int>(sets.size()); }
  /// Throws unless boxes have disjoint interiors and label sets share no label.
  void validate() const;
  /// (xi(A_1), ..., xi(A_d))
  LatticePoint counts(const PointPattern& xi) const;
};

/// Regular grid with cells[a] cells along axis a; cells in row-major order.
PartitionSpec grid_partition(const Box& window, const std::vector<int>& cells);
/// Partition of a label space into singletons.
PartitionSpec singleton_partition(const LabelSpace& space);

void to_json(nlohmann::json& j, const Box& b);
Box box_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const Region& r);
Region region_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const PartitionSpec& p);
PartitionSpec partition_from_json(const nlohmann::json& j);
Window window_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const PointPattern& p);

}  // namespace pal
