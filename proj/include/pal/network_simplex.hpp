#pragma once

#include <cstdint>
#include <vector>

namespace pal {

/// Primal network simplex for uncapacitated min-cost flow with real supplies.
///
/// Nodes carry supplies b(v) summing to zero; arcs have non-negative costs and
/// unbounded capacity. The spanning-tree bookkeeping (thread / rev_thread /
/// succ_num / last_succ) follows the classic LEMON layout, with block search
/// pivoting. After solve() the potentials certify optimality:
/// cost(a) + pi(source) - pi(target) >= 0 on every arc, = 0 on tree arcs.
class NetworkSimplex {
 public:
  enum class Status { kOptimal, kInfeasible, kUnbounded };

  explicit NetworkSimplex(int node_count);

  int add_arc(int source, int target, double cost);
  void reserve_arcs(std::size_t n) {
    source_.reserve(n);
    target_.reserve(n);
    cost_.reserve(n);
  }
  void set_supply(int node, double supply) { supply_[node] = supply; }

  Status solve();

  int node_count() const { return node_num_; }
  int arc_count() const { return arc_num_; }
  double flow(int arc) const { return flow_[arc]; }
  double potential(int node) const { return pi_[node]; }
  double total_cost() const;
  /// -sum_v b(v) pi(v), equal to total_cost() at optimality.
  double dual_objective() const;
  /// Largest violation of reduced-cost optimality over the real arcs.
  double max_dual_infeasibility() const;
  /// Largest flow left on artificial arcs (0 when the supplies were routed).
  double max_artificial_flow() const;
  std::int64_t pivots() const { return pivots_; }

 private:
  void init();
  bool find_entering_arc();
  void find_join_node();
  bool find_leaving_arc();
  void change_flow();
  void update_tree_structure();
  void update_potential();
  double reduced_cost(int e) const { return cost_[e] + pi_[source_[e]] - pi_[target_[e]]; }

  int node_num_;
  int arc_num_ = 0;
  std::vector<double> supply_;

  // arcs: real ones first, then one artificial arc per node
  std::vector<int> source_, target_;
  std::vector<double> cost_, flow_;
  std::vector<signed char> state_;

  // spanning tree
  std::vector<double> pi_;
  std::vector<int> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_, dirty_revs_;
  std::vector<signed char> pred_dir_;
  int root_ = 0;

  // pivot data
  int in_arc_ = 0, join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0, v_out_ = 0;
  double delta_ = 0.0;
  int block_size_ = 0, next_arc_ = 0, search_arc_num_ = 0;
  double eps_ = 0.0;
  std::int64_t pivots_ = 0;
};

}  // namespace pal
