#include "pal/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pal/errors.hpp"
#include "pal/exact_sum.hpp"

namespace pal {

namespace {

constexpr double kTableTolerance = 1e-12;

}  // namespace

void CouplingTable::validate() const {
  if (dim < 1) throw ParameterError("CouplingTable: dim must be >= 1");
  ExactSum total;
  for (const auto& [key, p] : joint) {
    const auto& [x, z] = key;
    if (static_cast<int>(x.size()) != dim || static_cast<int>(z.size()) != dim)
      throw ParameterError("CouplingTable: entry has wrong length");
    for (int v : x)
      if (v < 0) throw ParameterError("CouplingTable: negative coordinate in x");
    if (!(p >= 0.0) || !std::isfinite(p)) throw ParameterError("CouplingTable: invalid probability");
    total += p;
  }
  if (!(tail_mass >= 0.0)) throw ParameterError("CouplingTable: negative tail mass");
  total += tail_mass;
  if (std::abs(total.value() - 1.0) > kTableTolerance)
    throw ContractError("CouplingTable: probabilities do not sum to 1");
}

LatticePmf CouplingTable::x_marginal() const {
  std::map<LatticePoint, ExactSum> acc;
  for (const auto& [key, p] : joint) acc[key.first] += p;
  LatticePmf::AtomMap atoms;
  for (const auto& [x, s] : acc) atoms[x] = s.value();
  return LatticePmf(dim, std::move(atoms), tail_mass, 0.0);
}

std::vector<double> CouplingTable::abs_z_means() const {
  std::vector<ExactSum> acc(dim);
  for (const auto& [key, p] : joint)
    for (int j = 0; j < dim; ++j) acc[j].add_product(p, std::abs(static_cast<double>(key.second[j])));
  std::vector<double> out(dim);
  for (int j = 0; j < dim; ++j) out[j] = acc[j].value();
  return out;
}

double CouplingTable::prob_leading_nonzero() const {
  ExactSum acc;
  for (const auto& [key, p] : joint) {
    const auto& z = key.second;
    if (std::any_of(z.begin(), z.end() - 1, [](int v) { return v != 0; })) acc += p;
  }
  return acc.value();
}

CouplingTable CouplingTable::zero(const LatticePmf& x_prefix) {
  return deterministic(x_prefix, [&](const LatticePoint&) { return LatticePoint(x_prefix.dim(), 0); });
}

double QTermTable::abs_sum() const {
  ExactSum s;
  for (const auto& [m, q] : terms) s += std::abs(q);
  return s.value();
}

double QTermTable::max_abs() const {
  double w = 0.0;
  for (const auto& [m, q] : terms) w = std::max(w, std::abs(q));
  return w;
}

QTermTable q_terms_from_coupling(const LatticePmf& x_prefix, double lambda_i, const CouplingTable& coupling) {
  coupling.validate();
  if (x_prefix.dim() != coupling.dim) throw ParameterError("q-terms: dimension mismatch");
  if (!(lambda_i >= 0.0) || !std::isfinite(lambda_i)) throw ParameterError("q-terms: lambda must be >= 0");
  const int i = coupling.dim;

  // the table's X-marginal must be the declared law
  const LatticePmf marginal = coupling.x_marginal();
  std::set<LatticePoint> keys;
  for (const auto& [x, p] : marginal.atoms()) keys.insert(x);
  for (const auto& [x, p] : x_prefix.atoms()) keys.insert(x);
  for (const auto& x : keys)
    if (std::abs(marginal.prob(x) - x_prefix.prob(x)) > kTableTolerance)
      throw ContractError("q-terms: coupling marginal differs from the law of X");
  if (std::abs(coupling.tail_mass - x_prefix.tail_mass()) > kTableTolerance)
    throw ContractError("q-terms: coupling tail mass differs from the law of X");

  std::map<LatticePoint, ExactSum> acc;
  for (const auto& [x, p] : x_prefix.atoms())
    if (x[i - 1] >= 1) acc[x].add_product(static_cast<double>(x[i - 1]), p);
  for (const auto& [key, p] : coupling.joint) {
    LatticePoint y(i);
    bool inside = true;
    for (int j = 0; j < i; ++j) {
      y[j] = key.first[j] + key.second[j];
      if (y[j] < 0) inside = false;
    }
    if (!inside) continue;
    y[i - 1] += 1;
    acc[y].add_product(-lambda_i, p);
  }
  QTermTable out;
  out.dim = i;
  for (const auto& [m, s] : acc) {
    const double v = s.value();
    if (v != 0.0) out.terms[m] = v;
  }
  return out;
}

CouplingBoundTerms coupling_bound_terms(const PoissonVectorParams& lambdas, const std::vector<CouplingTable>& couplings,
                                  bool improved) {
  lambdas.validate();
  const int d = lambdas.dim();
  if (static_cast<int>(couplings.size()) != d)
    throw ParameterError("coupling bound: need exactly one coupling per coordinate");
  CouplingBoundTerms out;
  out.own_shift.resize(d);
  out.cross_shift.resize(d);
  out.q_sum.resize(d);
  ExactSum total;
  for (int i = 0; i < d; ++i) {
    const CouplingTable& c = couplings[i];
    if (c.dim != i + 1) throw ParameterError("coupling bound: coupling " + std::to_string(i + 1) + " has wrong dim");
    c.validate();
    const double lam = lambdas.lambdas[i];
    const std::vector<double> ez = c.abs_z_means();
    out.own_shift[i] = lam * ez[i];
    if (improved) {
      out.cross_shift[i] = 2.0 * lam * c.prob_leading_nonzero();
    } else {
      ExactSum s;
      for (int j = 0; j < i; ++j) s += ez[j];
      out.cross_shift[i] = 2.0 * lam * s.value();
    }
    out.q_sum[i] = q_terms_from_coupling(c.x_marginal(), lam, c).abs_sum();
    total += out.own_shift[i];
    total += out.cross_shift[i];
    total += out.q_sum[i];
  }
  out.total = total.value();
  return out;
}

double coupling_bound(const PoissonVectorParams& lambdas, const std::vector<CouplingTable>& couplings,
                      bool improved) {
  return coupling_bound_terms(lambdas, couplings, improved).total;
}

SizeBiasReport size_bias_check(const LatticePmf& x, const PoissonVectorParams& lambdas,
                               const std::vector<CouplingTable>& couplings) {
  lambdas.validate();
  const int d = lambdas.dim();
  if (x.dim() != d || static_cast<int>(couplings.size()) != d)
    throw ParameterError("size_bias_check: dimension mismatch");
  SizeBiasReport rep;
  const std::vector<double> mean = x.mean();
  for (int i = 0; i < d; ++i) {
    const LatticePmf prefix = x.prefix_marginal(i + 1);
    const CouplingTable& c = couplings[i];
    rep.max_mean_gap = std::max(rep.max_mean_gap, std::abs(mean[i] - lambdas.lambdas[i]));
    rep.max_q_term = std::max(rep.max_q_term, q_terms_from_coupling(prefix, lambdas.lambdas[i], c).max_abs());

    // law of Y = (X_{1:i-1}, X_i + 1) + Z
    std::map<LatticePoint, ExactSum> y_law;
    for (const auto& [key, p] : c.joint) {
      LatticePoint y(i + 1);
      for (int j = 0; j <= i; ++j) y[j] = key.first[j] + key.second[j];
      y[i] += 1;
      y_law[y] += p;
    }
    std::set<LatticePoint> points;
    for (const auto& [a, s] : y_law) points.insert(a);
    for (const auto& [a, p] : prefix.atoms()) points.insert(a);
    for (const auto& a : points) {
      const double lhs = a[i] * prefix.prob(a);
      auto it = y_law.find(a);
      const double py = it == y_law.end() ? 0.0 : it->second.value();
      rep.max_defect = std::max(rep.max_defect, std::abs(lhs - mean[i] * py));
    }
  }
  return rep;
}

}  // namespace pal
