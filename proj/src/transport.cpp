#include "pal/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pal/errors.hpp"
#include "pal/exact_sum.hpp"
#include "pal/network_simplex.hpp"

namespace pal {

namespace {

void check_pair(const LatticePmf& p, const LatticePmf& q) {
  if (p.dim() != q.dim())
    throw ParameterError("distance: dimension mismatch (" + std::to_string(p.dim()) + " vs " +
                         std::to_string(q.dim()) + ")");
}

struct SignedMass {
  LatticePoint x;
  double mass;  // > 0 supply, < 0 demand
};

// Net mass P' - Q' per point after renormalising both to one; common mass
// stays in place because the cost is a metric.
std::vector<SignedMass> net_masses(const LatticePmf& p, const LatticePmf& q) {
  const double sp = p.stored_mass();
  const double sq = q.stored_mass();
  std::vector<SignedMass> out;
  auto ip = p.atoms().begin();
  auto iq = q.atoms().begin();
  while (ip != p.atoms().end() || iq != q.atoms().end()) {
    if (iq == q.atoms().end() || (ip != p.atoms().end() && ip->first < iq->first)) {
      out.push_back({ip->first, ip->second / sp});
      ++ip;
    } else if (ip == p.atoms().end() || iq->first < ip->first) {
      out.push_back({iq->first, -iq->second / sq});
      ++iq;
    } else {
      const double m = ip->second / sp - iq->second / sq;
      if (m != 0.0) out.push_back({ip->first, m});
      ++ip;
      ++iq;
    }
  }
  return out;
}

// Pushes the rounding residual onto the largest node so supplies balance exactly.
void balance(std::vector<double>& supply) {
  if (supply.empty()) return;
  ExactSum s;
  for (double b : supply) s.add(b);
  std::size_t big = 0;
  for (std::size_t i = 1; i < supply.size(); ++i)
    if (std::abs(supply[i]) > std::abs(supply[big])) big = i;
  supply[big] -= s.value();
}

double check_certificate(const NetworkSimplex& ns, double value) {
  // integer costs give integer potentials, so the reduced costs are exact
  if (ns.max_dual_infeasibility() > 1e-9)
    throw ContractError("wasserstein_l1: complementary slackness check failed");
  const double gap = std::abs(ns.dual_objective() - value);
  if (gap > 1e-9 * std::max(1.0, value))
    throw ContractError("wasserstein_l1: primal/dual gap " + std::to_string(gap));
  return value;
}

DistanceResult solve_bipartite(const std::vector<SignedMass>& net, bool want_flow) {
  std::vector<int> src, dst;
  for (std::size_t i = 0; i < net.size(); ++i) (net[i].mass > 0.0 ? src : dst).push_back(static_cast<int>(i));
  DistanceResult out;
  if (src.empty() || dst.empty()) {
    if (want_flow) out.flow.emplace();
    return out;
  }
  const int ns_nodes = static_cast<int>(src.size() + dst.size());
  NetworkSimplex ns(ns_nodes);
  ns.reserve_arcs(src.size() * dst.size());
  std::vector<double> supply(ns_nodes);
  for (std::size_t a = 0; a < src.size(); ++a) supply[a] = net[src[a]].mass;
  for (std::size_t b = 0; b < dst.size(); ++b) supply[src.size() + b] = net[dst[b]].mass;
  balance(supply);
  for (int v = 0; v < ns_nodes; ++v) ns.set_supply(v, supply[v]);
  for (std::size_t a = 0; a < src.size(); ++a)
    for (std::size_t b = 0; b < dst.size(); ++b)
      ns.add_arc(static_cast<int>(a), static_cast<int>(src.size() + b),
                 l1_distance(net[src[a]].x, net[dst[b]].x));
  if (ns.solve() != NetworkSimplex::Status::kOptimal)
    throw ContractError("wasserstein_l1: transport problem not solved to optimality");
  out.value = check_certificate(ns, ns.total_cost());
  if (want_flow) {
    std::vector<FlowEntry> flow;
    // moved mass between distinct points
    int e = 0;
    for (std::size_t a = 0; a < src.size(); ++a)
      for (std::size_t b = 0; b < dst.size(); ++b, ++e)
        if (ns.flow(e) > 0.0) flow.push_back({net[src[a]].x, net[dst[b]].x, ns.flow(e)});
    out.flow = std::move(flow);
  }
  return out;
}

DistanceResult solve_lattice(const std::vector<SignedMass>& net, int dim, std::size_t arc_budget) {
  DistanceResult out;
  if (net.empty()) return out;
  LatticePoint lo = net.front().x, hi = net.front().x;
  for (const auto& s : net)
    for (int i = 0; i < dim; ++i) {
      lo[i] = std::min(lo[i], s.x[i]);
      hi[i] = std::max(hi[i], s.x[i]);
    }
  std::vector<std::size_t> extent(dim), stride(dim);
  double volume = 1.0;
  for (int i = 0; i < dim; ++i) {
    extent[i] = static_cast<std::size_t>(hi[i] - lo[i] + 1);
    volume *= static_cast<double>(extent[i]);
  }
  if (volume * 2.0 * dim > static_cast<double>(arc_budget) || volume > 2e9)
    throw CapacityError("wasserstein_l1: lattice graph exceeds the arc budget");
  std::size_t total = 1;
  for (int i = dim - 1; i >= 0; --i) {
    stride[i] = total;
    total *= extent[i];
  }
  const int nodes = static_cast<int>(total);
  NetworkSimplex ns(nodes);
  ns.reserve_arcs(2 * static_cast<std::size_t>(dim) * total);
  std::vector<double> supply(total, 0.0);
  for (const auto& s : net) {
    std::size_t idx = 0;
    for (int i = 0; i < dim; ++i) idx += static_cast<std::size_t>(s.x[i] - lo[i]) * stride[i];
    supply[idx] += s.mass;
  }
  balance(supply);
  for (int v = 0; v < nodes; ++v) ns.set_supply(v, supply[v]);
  for (std::size_t v = 0; v < total; ++v) {
    for (int i = 0; i < dim; ++i) {
      const std::size_t coord = (v / stride[i]) % extent[i];
      if (coord + 1 < extent[i]) {
        const int a = static_cast<int>(v), b = static_cast<int>(v + stride[i]);
        ns.add_arc(a, b, 1.0);
        ns.add_arc(b, a, 1.0);
      }
    }
  }
  if (ns.solve() != NetworkSimplex::Status::kOptimal)
    throw ContractError("wasserstein_l1: lattice transshipment not solved to optimality");
  out.value = check_certificate(ns, ns.total_cost());
  return out;
}

}  // namespace

DistanceResult wasserstein_l1(const LatticePmf& p, const LatticePmf& q, const TransportOptions& opts) {
  check_pair(p, q);
  if (p.size() == 0 || q.size() == 0) throw ParameterError("wasserstein_l1: empty support");
  const auto net = net_masses(p, q);

  std::size_t n_src = 0, n_dst = 0;
  for (const auto& s : net) (s.mass > 0.0 ? n_src : n_dst)++;
  const double bip_arcs = static_cast<double>(n_src) * static_cast<double>(n_dst);
  double volume = 1.0;
  if (!net.empty()) {
    for (int i = 0; i < p.dim(); ++i) {
      int lo = net.front().x[i], hi = lo;
      for (const auto& s : net) {
        lo = std::min(lo, s.x[i]);
        hi = std::max(hi, s.x[i]);
      }
      volume *= hi - lo + 1.0;
    }
  }
  const double lattice_arcs = 2.0 * p.dim() * volume;

  TransportGraph graph = opts.graph;
  if (opts.want_flow) graph = TransportGraph::kBipartite;
  if (graph == TransportGraph::kAuto)
    graph = (bip_arcs <= 200'000.0 || bip_arcs <= 1.5 * lattice_arcs) ? TransportGraph::kBipartite
                                                                       : TransportGraph::kLattice;
  if (graph == TransportGraph::kBipartite && bip_arcs > static_cast<double>(opts.arc_budget))
    throw CapacityError("wasserstein_l1: bipartite graph exceeds the arc budget");

  DistanceResult out = graph == TransportGraph::kBipartite ? solve_bipartite(net, opts.want_flow)
                                                           : solve_lattice(net, p.dim(), opts.arc_budget);
  if (out.flow) {
    // mass shared by both laws stays where it is
    const double sp = p.stored_mass(), sq = q.stored_mass();
    for (const auto& [x, mp] : p.atoms()) {
      const double stay = std::min(mp / sp, q.prob(x) / sq);
      if (stay > 0.0) out.flow->push_back({x, x, stay});
    }
  }

  // Moving a truncated law to its renormalised atoms costs at most
  // tail_moment + tail_mass * (largest |y|_1 among the atoms).
  const double diam = std::max(p.max_l1(), q.max_l1());
  out.truncation_error = p.tail_moment() + q.tail_moment() + (p.tail_mass() + q.tail_mass()) * diam;
  return out;
}

DistanceResult total_variation(const LatticePmf& p, const LatticePmf& q) {
  check_pair(p, q);
  ExactSum s;
  auto ip = p.atoms().begin();
  auto iq = q.atoms().begin();
  while (ip != p.atoms().end() || iq != q.atoms().end()) {
    if (iq == q.atoms().end() || (ip != p.atoms().end() && ip->first < iq->first)) {
      s.add(ip->second);
      ++ip;
    } else if (ip == p.atoms().end() || iq->first < ip->first) {
      s.add(iq->second);
      ++iq;
    } else {
      s.add(std::abs(ip->second - iq->second));
      ++ip;
      ++iq;
    }
  }
  DistanceResult out;
  out.value = 0.5 * s.value();
  out.truncation_error = p.tail_mass() + q.tail_mass();
  return out;
}

void write_flow_csv(std::ostream& os, const std::vector<FlowEntry>& flow) {
  auto point = [&](const LatticePoint& x) {
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? " " : "") << x[i];
  };
  os << "x,y,mass\n";
  os.precision(17);
  for (const auto& f : flow) {
    point(f.from);
    os << ',';
    point(f.to);
    os << ',' << f.mass << '\n';
  }
}

}  // namespace pal
