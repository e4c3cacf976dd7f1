#include "pal/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pal/errors.hpp"
#include "pal/exact_sum.hpp"
#include "pal/poisson.hpp"

namespace pal {

int l1_norm(std::span<const int> x) {
  int s = 0;
  for (int v : x) s += std::abs(v);
  return s;
}

int l1_distance(std::span<const int> x, std::span<const int> y) {
  int s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s;
}

LatticePmf::LatticePmf(int dim, AtomMap atoms, double tail_mass, double tail_moment)
    : dim_(dim), tail_mass_(tail_mass), tail_moment_(tail_moment) {
  if (dim < 1) throw ParameterError("LatticePmf: dim must be positive");
  if (!(tail_mass >= 0.0) || !std::isfinite(tail_mass))
    throw ParameterError("LatticePmf: tail_mass must be finite and >= 0");
  if (!(tail_moment >= 0.0) || !std::isfinite(tail_moment))
    throw ParameterError("LatticePmf: tail_moment must be finite and >= 0");
  for (auto& [x, p] : atoms) {
    if (static_cast<int>(x.size()) != dim)
      throw ParameterError("LatticePmf: atom of dimension " + std::to_string(x.size()) +
                           " in a pmf of dimension " + std::to_string(dim));
    if (std::any_of(x.begin(), x.end(), [](int v) { return v < 0; }))
      throw ParameterError("LatticePmf: atoms must have non-negative coordinates");
    if (!(p >= 0.0) || !std::isfinite(p)) throw ParameterError("LatticePmf: negative or non-finite mass");
    if (p > 0.0) atoms_.emplace_hint(atoms_.end(), x, p);
  }
  if (normalization_defect() > kNormalizationTolerance)
    throw ParameterError("LatticePmf: masses do not sum to one (defect " +
                         std::to_string(normalization_defect()) + ")");
}

LatticePmf LatticePmf::dirac(LatticePoint x) {
  const int d = static_cast<int>(x.size());
  AtomMap atoms;
  atoms.emplace(std::move(x), 1.0);
  return LatticePmf(d, std::move(atoms));
}

double LatticePmf::prob(const LatticePoint& x) const {
  auto it = atoms_.find(x);
  return it == atoms_.end() ? 0.0 : it->second;
}

double LatticePmf::stored_mass() const {
  CompensatedSum s;
  for (const auto& [x, p] : atoms_) s += p;
  return s.value();
}

double LatticePmf::normalization_defect() const {
  return std::abs(stored_mass() + tail_mass_ - 1.0);
}

std::vector<double> LatticePmf::mean() const {
  std::vector<CompensatedSum> acc(dim_);
  for (const auto& [x, p] : atoms_)
    for (int i = 0; i < dim_; ++i) acc[i] += p * x[i];
  std::vector<double> out(dim_);
  for (int i = 0; i < dim_; ++i) out[i] = acc[i].value();
  return out;
}

int LatticePmf::max_l1() const {
  int m = 0;
  for (const auto& [x, p] : atoms_) m = std::max(m, l1_norm(x));
  return m;
}

LatticePoint LatticePmf::upper_corner() const {
  LatticePoint hi(dim_, 0);
  for (const auto& [x, p] : atoms_)
    for (int i = 0; i < dim_; ++i) hi[i] = std::max(hi[i], x[i]);
  return hi;
}

LatticePmf LatticePmf::prefix_marginal(int prefix) const {
  if (prefix < 1 || prefix > dim_) throw ParameterError("prefix_marginal: prefix out of range");
  if (prefix == dim_) return *this;
  AtomMap out;
  for (const auto& [x, p] : atoms_) out[LatticePoint(x.begin(), x.begin() + prefix)] += p;
  // |x_{1:i}|_1 <= |x|_1, so the tail moment bound carries over
  return LatticePmf(prefix, std::move(out), tail_mass_, tail_moment_);
}

void PoissonVectorParams::validate() const {
  if (lambdas.empty()) throw ParameterError("PoissonVectorParams: need at least one coordinate");
  for (double l : lambdas)
    if (!(l >= 0.0) || !std::isfinite(l))
      throw ParameterError("PoissonVectorParams: rates must be finite and >= 0");
}

void SampleBatch::validate() const {
  if (dim < 1) throw ParameterError("SampleBatch: dim must be positive");
  if (rows.empty()) throw ParameterError("SampleBatch: empty batch");
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != dim) throw ParameterError("SampleBatch: row of wrong dimension");
    if (std::any_of(r.begin(), r.end(), [](int v) { return v < 0; }))
      throw ParameterError("SampleBatch: negative coordinate");
  }
}

LatticePmf poisson_vector_pmf(const PoissonVectorParams& params, double eps,
                              std::size_t atom_budget) {
  params.validate();
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("poisson_vector_pmf: eps must lie in (0,1)");
  const int d = params.dim();

  // Split the budget evenly; the box tail is 1 - prod(1 - t_i) <= sum t_i <= eps.
  const double eps_coord = eps / d;
  std::vector<int> cut(d);
  std::vector<double> tail(d), tail_ge(d);
  std::vector<std::vector<double>> pmf(d);
  double box = 1.0;
  for (int i = 0; i < d; ++i) {
    const double lam = params.lambdas[i];
    cut[i] = poisson_truncation_point(lam, eps_coord);
    tail[i] = poisson_upper_tail(lam, cut[i]);
    tail_ge[i] = poisson_upper_tail(lam, cut[i] - 1);
    pmf[i] = poisson_pmf_table(lam, cut[i]);
    box *= cut[i] + 1.0;
  }
  if (box > static_cast<double>(atom_budget))
    throw CapacityError("poisson_vector_pmf: truncated box has " + std::to_string(box) +
                        " atoms, above the budget of " + std::to_string(atom_budget));

  // log of prob(all coordinates inside), and the same with coordinate j left out
  double log_inside = 0.0;
  for (int i = 0; i < d; ++i) log_inside += std::log1p(-tail[i]);
  const double tail_mass = -std::expm1(log_inside);

  // E[P_j ; outside] = E[P_j ; P_j > N_j] + E[P_j ; P_j <= N_j] * P(some other coordinate outside)
  double tail_moment = 0.0;
  for (int j = 0; j < d; ++j) {
    const double lam = params.lambdas[j];
    const double others_out = -std::expm1(log_inside - std::log1p(-tail[j]));
    tail_moment += lam * tail_ge[j] + lam * (1.0 - tail_ge[j]) * others_out;
  }

  LatticePmf::AtomMap atoms;
  LatticePoint x(d, 0);
  // odometer over the box, last coordinate fastest so insertion is ordered
  while (true) {
    double p = 1.0;
    for (int i = 0; i < d; ++i) p *= pmf[i][x[i]];
    atoms.emplace_hint(atoms.end(), x, p);
    int i = d - 1;
    while (i >= 0 && x[i] == cut[i]) x[i--] = 0;
    if (i < 0) break;
    ++x[i];
  }
  return LatticePmf(d, std::move(atoms), tail_mass, tail_moment);
}

LatticePmf bernoulli_sum_pmf(const std::vector<std::vector<double>>& p, std::size_t atom_budget) {
  if (p.empty()) throw ParameterError("bernoulli_sum_pmf: need at least one row");
  const int d = static_cast<int>(p.front().size());
  if (d < 1) throw ParameterError("bernoulli_sum_pmf: rows must be non-empty");
  const int n = static_cast<int>(p.size());
  for (const auto& row : p) {
    if (static_cast<int>(row.size()) != d) throw ParameterError("bernoulli_sum_pmf: ragged matrix");
    double s = 0.0;
    for (double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("bernoulli_sum_pmf: entries must lie in [0,1]");
      s += v;
    }
    if (s > 1.0 + 1e-12) throw ParameterError("bernoulli_sum_pmf: row sum exceeds one");
  }

  // dense DP on [0,n]^d with strides; only the simplex sum(x) <= rows seen is ever touched
  const double cells = std::pow(n + 1.0, d);
  if (cells > static_cast<double>(atom_budget))
    throw CapacityError("bernoulli_sum_pmf: dense support exceeds the atom budget");
  std::vector<std::size_t> stride(d);
  std::size_t total = 1;
  for (int i = d - 1; i >= 0; --i) {
    stride[i] = total;
    total *= static_cast<std::size_t>(n + 1);
  }
  std::vector<double> cur(total, 0.0), next(total, 0.0);
  cur[0] = 1.0;
  std::vector<std::size_t> live{0};
  std::vector<char> mark(total, 0);

  for (const auto& row : p) {
    double stay = 1.0;
    for (double v : row) stay -= v;
    if (stay < 0.0) stay = 0.0;
    std::vector<std::size_t> next_live;
    next_live.reserve(live.size() * 2);
    auto touch = [&](std::size_t idx, double mass) {
      if (!mark[idx]) {
        mark[idx] = 1;
        next_live.push_back(idx);
      }
      next[idx] += mass;
    };
    for (std::size_t idx : live) {
      const double m = cur[idx];
      if (stay > 0.0) touch(idx, m * stay);
      for (int j = 0; j < d; ++j)
        if (row[j] > 0.0) touch(idx + stride[j], m * row[j]);
    }
    for (std::size_t idx : live) cur[idx] = 0.0;
    for (std::size_t idx : next_live) mark[idx] = 0;
    std::swap(cur, next);
    live = std::move(next_live);
  }

  std::sort(live.begin(), live.end());
  LatticePmf::AtomMap atoms;
  for (std::size_t idx : live) {
    LatticePoint x(d);
    std::size_t rem = idx;
    for (int i = 0; i < d; ++i) {
      x[i] = static_cast<int>(rem / stride[i]);
      rem %= stride[i];
    }
    atoms.emplace(std::move(x), cur[idx]);
  }
  return LatticePmf(d, std::move(atoms));
}

LatticePmf empirical_pmf(int dim, const std::map<LatticePoint, std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (const auto& [x, c] : counts) total += c;
  if (total == 0) throw ParameterError("empirical_pmf: empty batch");
  LatticePmf::AtomMap atoms;
  for (const auto& [x, c] : counts)
    atoms.emplace_hint(atoms.end(), x, static_cast<double>(c) / static_cast<double>(total));
  return LatticePmf(dim, std::move(atoms));
}

LatticePmf empirical_pmf(const SampleBatch& batch) {
  batch.validate();
  std::map<LatticePoint, std::uint64_t> counts;
  for (const auto& r : batch.rows) ++counts[r];
  return empirical_pmf(batch.dim, counts);
}

void to_json(nlohmann::json& j, const LatticePmf& pmf) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& [x, p] : pmf.atoms()) atoms.push_back({{"x", x}, {"p", p}});
  j = nlohmann::json{{"dim", pmf.dim()},
                     {"atoms", std::move(atoms)},
                     {"tail_mass", pmf.tail_mass()},
                     {"tail_moment", pmf.tail_moment()}};
}

LatticePmf lattice_pmf_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParameterError("LatticePmf JSON: expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "dim" && key != "atoms" && key != "tail_mass" && key != "tail_moment")
      throw ParameterError("LatticePmf JSON: unknown key '" + key + "'");
  }
  if (!j.contains("dim") || !j.contains("atoms"))
    throw ParameterError("LatticePmf JSON: 'dim' and 'atoms' are required");
  const int dim = j.at("dim").get<int>();
  LatticePmf::AtomMap atoms;
  for (const auto& a : j.at("atoms")) {
    auto x = a.at("x").get<LatticePoint>();
    atoms[std::move(x)] += a.at("p").get<double>();
  }
  return LatticePmf(dim, std::move(atoms), j.value("tail_mass", 0.0), j.value("tail_moment", 0.0));
}

}  // namespace pal
