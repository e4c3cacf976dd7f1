#include "pal/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pal/errors.hpp"
#include "pal/exact_sum.hpp"

namespace pal {

namespace {
constexpr signed char kStateTree = 0;
constexpr signed char kStateLower = 1;
constexpr signed char kDirUp = 1;
constexpr signed char kDirDown = -1;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

NetworkSimplex::NetworkSimplex(int node_count) : node_num_(node_count), supply_(node_count, 0.0) {
  if (node_count < 1) throw ParameterError("NetworkSimplex: need at least one node");
}

int NetworkSimplex::add_arc(int source, int target, double cost) {
  if (source < 0 || source >= node_num_ || target < 0 || target >= node_num_)
    throw ParameterError("NetworkSimplex: arc endpoint out of range");
  if (!(cost >= 0.0) || !std::isfinite(cost)) throw ParameterError("NetworkSimplex: arc costs must be finite and >= 0");
  source_.push_back(source);
  target_.push_back(target);
  cost_.push_back(cost);
  return arc_num_++;
}

void NetworkSimplex::init() {
  const int all_arcs = arc_num_ + node_num_;
  source_.resize(all_arcs);
  target_.resize(all_arcs);
  cost_.resize(all_arcs);
  flow_.assign(all_arcs, 0.0);
  state_.assign(all_arcs, kStateLower);

  const int n = node_num_ + 1;
  pi_.assign(n, 0.0);
  parent_.assign(n, -1);
  pred_.assign(n, -1);
  thread_.assign(n, 0);
  rev_thread_.assign(n, 0);
  succ_num_.assign(n, 0);
  last_succ_.assign(n, 0);
  pred_dir_.assign(n, 0);
  dirty_revs_.clear();
  dirty_revs_.reserve(n);

  double max_cost = 0.0;
  for (int e = 0; e < arc_num_; ++e) max_cost = std::max(max_cost, cost_[e]);
  const double art_cost = (max_cost + 1.0) * node_num_;
  eps_ = 1e-12 * std::max(1.0, art_cost);

  root_ = node_num_;
  parent_[root_] = -1;
  pred_[root_] = -1;
  thread_[root_] = 0;
  rev_thread_[0] = root_;
  succ_num_[root_] = node_num_ + 1;
  last_succ_[root_] = root_ - 1;
  pi_[root_] = 0.0;

  search_arc_num_ = arc_num_;
  for (int u = 0, e = arc_num_; u != node_num_; ++u, ++e) {
    parent_[u] = root_;
    pred_[u] = e;
    thread_[u] = u + 1;
    rev_thread_[u + 1] = u;
    succ_num_[u] = 1;
    last_succ_[u] = u;
    state_[e] = kStateTree;
    if (supply_[u] >= 0.0) {
      pred_dir_[u] = kDirUp;
      pi_[u] = 0.0;
      source_[e] = u;
      target_[e] = root_;
      flow_[e] = supply_[u];
      cost_[e] = 0.0;
    } else {
      pred_dir_[u] = kDirDown;
      pi_[u] = art_cost;
      source_[e] = root_;
      target_[e] = u;
      flow_[e] = -supply_[u];
      cost_[e] = art_cost;
    }
  }

  block_size_ = std::max(10, static_cast<int>(std::sqrt(static_cast<double>(std::max(1, arc_num_)))));
  next_arc_ = 0;
  pivots_ = 0;
}

bool NetworkSimplex::find_entering_arc() {
  if (search_arc_num_ == 0) return false;
  double min = 0.0;
  int cnt = block_size_;
  int e;
  for (e = next_arc_; e != search_arc_num_; ++e) {
    const double c = state_[e] * reduced_cost(e);
    if (c < min) {
      min = c;
      in_arc_ = e;
    }
    if (--cnt == 0) {
      if (min < -eps_) goto found;
      cnt = block_size_;
    }
  }
  for (e = 0; e != next_arc_; ++e) {
    const double c = state_[e] * reduced_cost(e);
    if (c < min) {
      min = c;
      in_arc_ = e;
    }
    if (--cnt == 0) {
      if (min < -eps_) goto found;
      cnt = block_size_;
    }
  }
  if (min >= -eps_) return false;
found:
  next_arc_ = e;
  return true;
}

void NetworkSimplex::find_join_node() {
  int u = source_[in_arc_];
  int v = target_[in_arc_];
  while (u != v) {
    if (succ_num_[u] < succ_num_[v])
      u = parent_[u];
    else
      v = parent_[v];
  }
  join_ = u;
}

bool NetworkSimplex::find_leaving_arc() {
  // entering arcs are always at their lower bound: push along source -> target
  const int first = source_[in_arc_];
  const int second = target_[in_arc_];
  delta_ = kInf;
  int result = 0;
  for (int u = first; u != join_; u = parent_[u]) {
    if (pred_dir_[u] != kDirUp) continue;
    const double d = flow_[pred_[u]];
    if (d < delta_) {
      delta_ = d;
      u_out_ = u;
      result = 1;
    }
  }
  for (int u = second; u != join_; u = parent_[u]) {
    if (pred_dir_[u] != kDirDown) continue;
    const double d = flow_[pred_[u]];
    if (d <= delta_) {
      delta_ = d;
      u_out_ = u;
      result = 2;
    }
  }
  if (result == 1) {
    u_in_ = first;
    v_in_ = second;
  } else {
    u_in_ = second;
    v_in_ = first;
  }
  if (delta_ < 0.0) delta_ = 0.0;
  return result != 0;
}

void NetworkSimplex::change_flow() {
  if (delta_ > 0.0) {
    const double val = delta_;
    flow_[in_arc_] += val;
    for (int u = source_[in_arc_]; u != join_; u = parent_[u]) flow_[pred_[u]] -= pred_dir_[u] * val;
    for (int u = target_[in_arc_]; u != join_; u = parent_[u]) flow_[pred_[u]] += pred_dir_[u] * val;
  }
  state_[in_arc_] = kStateTree;
  flow_[pred_[u_out_]] = 0.0;
  state_[pred_[u_out_]] = kStateLower;
}

void NetworkSimplex::update_tree_structure() {
  const int old_rev_thread = rev_thread_[u_out_];
  const int old_succ_num = succ_num_[u_out_];
  const int old_last_succ = last_succ_[u_out_];
  v_out_ = parent_[u_out_];

  if (u_in_ == u_out_) {
    parent_[u_in_] = v_in_;
    pred_[u_in_] = in_arc_;
    pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;
    if (thread_[v_in_] != u_out_) {
      int after = thread_[old_last_succ];
      thread_[old_rev_thread] = after;
      rev_thread_[after] = old_rev_thread;
      after = thread_[v_in_];
      thread_[v_in_] = u_out_;
      rev_thread_[u_out_] = v_in_;
      thread_[old_last_succ] = after;
      rev_thread_[after] = old_last_succ;
    }
  } else {
    const int thread_continue = old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];

    // re-hang the stem between u_in and u_out
    int stem = u_in_;
    int par_stem = v_in_;
    int next_stem;
    int last = last_succ_[u_in_];
    int before;
    int after = thread_[last];
    thread_[v_in_] = u_in_;
    dirty_revs_.clear();
    dirty_revs_.push_back(v_in_);
    while (stem != u_out_) {
      next_stem = parent_[stem];
      thread_[last] = next_stem;
      dirty_revs_.push_back(last);

      before = rev_thread_[stem];
      thread_[before] = after;
      rev_thread_[after] = before;

      parent_[stem] = par_stem;
      par_stem = stem;
      stem = next_stem;

      last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
      after = thread_[last];
    }
    parent_[u_out_] = par_stem;
    thread_[last] = thread_continue;
    rev_thread_[thread_continue] = last;
    last_succ_[u_out_] = last;

    if (old_rev_thread != v_in_) {
      thread_[old_rev_thread] = after;
      rev_thread_[after] = old_rev_thread;
    }

    for (int u : dirty_revs_) rev_thread_[thread_[u]] = u;

    int tmp_sc = 0;
    const int tmp_ls = last_succ_[u_out_];
    for (int u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
      pred_[u] = pred_[p];
      pred_dir_[u] = static_cast<signed char>(-pred_dir_[p]);
      tmp_sc += succ_num_[u] - succ_num_[p];
      succ_num_[u] = tmp_sc;
      last_succ_[p] = tmp_ls;
    }
    pred_[u_in_] = in_arc_;
    pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;
    succ_num_[u_in_] = old_succ_num;
  }

  const int up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
  const int last_succ_out = last_succ_[u_out_];
  for (int u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u]) last_succ_[u] = last_succ_out;

  if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
    for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
      last_succ_[u] = old_rev_thread;
  } else if (last_succ_out != old_last_succ) {
    for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
      last_succ_[u] = last_succ_out;
  }

  for (int u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
  for (int u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
}

void NetworkSimplex::update_potential() {
  const double sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * cost_[in_arc_];
  const int end = thread_[last_succ_[u_in_]];
  for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
}

NetworkSimplex::Status NetworkSimplex::solve() {
  const int real_arcs = arc_num_;
  source_.resize(real_arcs);
  target_.resize(real_arcs);
  cost_.resize(real_arcs);
  init();
  while (find_entering_arc()) {
    find_join_node();
    if (!find_leaving_arc()) return Status::kUnbounded;
    change_flow();
    update_tree_structure();
    update_potential();
    ++pivots_;
  }
  double supply_scale = 0.0;
  for (double b : supply_) supply_scale = std::max(supply_scale, std::abs(b));
  if (max_artificial_flow() > 1e-9 * std::max(1.0, supply_scale)) return Status::kInfeasible;
  return Status::kOptimal;
}

double NetworkSimplex::total_cost() const {
  ExactSum s;
  for (int e = 0; e < arc_num_; ++e)
    if (flow_[e] != 0.0) s.add_product(flow_[e], cost_[e]);
  return s.value();
}

double NetworkSimplex::dual_objective() const {
  ExactSum s;
  for (int v = 0; v < node_num_; ++v) s.add_product(-supply_[v], pi_[v] - pi_[root_]);
  return s.value();
}

double NetworkSimplex::max_dual_infeasibility() const {
  double worst = 0.0;
  for (int e = 0; e < arc_num_; ++e) worst = std::max(worst, -reduced_cost(e));
  return worst;
}

double NetworkSimplex::max_artificial_flow() const {
  double worst = 0.0;
  for (int e = arc_num_; e < static_cast<int>(flow_.size()); ++e) worst = std::max(worst, std::abs(flow_[e]));
  return worst;
}

}  // namespace pal
