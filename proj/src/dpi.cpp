#include "pal/dpi.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pal/errors.hpp"
#include "pal/exact_sum.hpp"
#include "pal/stats.hpp"
#include "pal/transport.hpp"

namespace pal {

CountSource CountSource::poisson(std::function<double(const Region&)> measure, double total, double eps) {
  CountSource s;
  s.exact = [measure = std::move(measure), eps](const PartitionSpec& p) {
    PoissonVectorParams params;
    for (const auto& r : p.sets) params.lambdas.push_back(measure(r));
    return poisson_vector_pmf(params, eps);
  };
  s.exact_mean_total = total;
  return s;
}

CountSource CountSource::poisson(const IntensityMeasure& intensity, double eps) {
  CountSource s = poisson([intensity](const Region& r) { return intensity.measure(r); }, intensity.total(), eps);
  s.sampler = [intensity](Rng& rng) { return sample_poisson_process(intensity, rng); };
  return s;
}

CountSource CountSource::fixed(PointPattern pattern) {
  CountSource s;
  s.exact = [pattern](const PartitionSpec& p) { return LatticePmf::dirac(p.counts(pattern)); };
  s.exact_mean_total = static_cast<double>(pattern.size());
  s.sampler = [pattern](Rng&) { return pattern; };
  return s;
}

CountSource CountSource::sampled(std::function<PointPattern(Rng&)> sampler) {
  CountSource s;
  s.sampler = std::move(sampler);
  return s;
}

namespace {

// count vectors of every replicate for every partition, plus the totals
struct Draws {
  std::vector<std::vector<LatticePoint>> counts;  // [partition][rep]
  std::vector<double> totals;
};

Draws draw(const CountSource& src, const std::vector<PartitionSpec>& parts, std::uint64_t reps, std::uint64_t seed,
           Exec exec) {
  Draws d;
  d.counts.assign(parts.size(), std::vector<LatticePoint>(reps));
  d.totals.assign(reps, 0.0);
  for_each_index(reps, exec, [&](std::size_t t) {
    Rng rng = make_stream(seed, t);
    const PointPattern xi = src.sampler(rng);
    d.totals[t] = static_cast<double>(xi.size());
    for (std::size_t p = 0; p < parts.size(); ++p) d.counts[p][t] = parts[p].counts(xi);
  });
  return d;
}

LatticePmf law_of(const std::vector<LatticePoint>& rows, int dim, const std::vector<std::size_t>* pick) {
  std::map<LatticePoint, std::uint64_t> c;
  if (pick)
    for (std::size_t i : *pick) ++c[rows[i]];
  else
    for (const auto& r : rows) ++c[r];
  return empirical_pmf(dim, c);
}

}  // namespace

DpiEstimate dpi_lower_bound(const CountSource& xi, const CountSource& eta, const std::vector<PartitionSpec>& partitions,
                            const DpiOptions& opt) {
  if (partitions.empty()) throw ParameterError("d_pi estimate: need at least one partition");
  for (const auto& p : partitions) p.validate();
  const bool xi_exact = static_cast<bool>(xi.exact);
  const bool eta_exact = static_cast<bool>(eta.exact);
  if ((!xi_exact && !xi.sampler) || (!eta_exact && !eta.sampler))
    throw ParameterError("d_pi estimate: every source needs a sampler or an exact law");
  if ((xi_exact && !xi.exact_mean_total) || (eta_exact && !eta.exact_mean_total))
    throw ParameterError("d_pi estimate: exact sources must state their mean total");
  if ((!xi_exact || !eta_exact) && opt.reps < 2) throw ParameterError("d_pi estimate: need at least two replicates");

  const std::size_t np = partitions.size();
  std::vector<LatticePmf> xi_law, eta_law;
  Draws xi_draws, eta_draws;
  double xi_mean, eta_mean;
  if (xi_exact) {
    for (const auto& p : partitions) xi_law.push_back(xi.exact(p));
    xi_mean = *xi.exact_mean_total;
  } else {
    xi_draws = draw(xi, partitions, opt.reps, derive_seed(opt.seed, 1), opt.exec);
    for (std::size_t p = 0; p < np; ++p) xi_law.push_back(law_of(xi_draws.counts[p], partitions[p].dim(), nullptr));
    xi_mean = mean_and_se(xi_draws.totals).mean;
  }
  if (eta_exact) {
    for (const auto& p : partitions) eta_law.push_back(eta.exact(p));
    eta_mean = *eta.exact_mean_total;
  } else {
    eta_draws = draw(eta, partitions, opt.reps, derive_seed(opt.seed, 2), opt.exec);
    for (std::size_t p = 0; p < np; ++p) eta_law.push_back(law_of(eta_draws.counts[p], partitions[p].dim(), nullptr));
    eta_mean = mean_and_se(eta_draws.totals).mean;
  }

  DpiEstimate out;
  out.exact = xi_exact && eta_exact;
  out.mean_shift = std::abs(xi_mean - eta_mean);
  out.per_partition.resize(np);
  for_each_index(np, opt.exec, [&](std::size_t p) {
    const DistanceResult w = wasserstein_l1(xi_law[p], eta_law[p]);
    const DistanceResult tv = total_variation(xi_law[p], eta_law[p]);
    out.per_partition[p] = {w.value, w.truncation_error, tv.value, tv.truncation_error};
  });
  for (std::size_t p = 0; p < np; ++p)
    if (out.best_partition < 0 || out.per_partition[p].wasserstein > out.estimate) {
      out.estimate = out.per_partition[p].wasserstein;
      out.best_partition = static_cast<int>(p);
    }
  if (out.exact || opt.bootstrap < 2) return out;

  // bootstrap the maximum by resampling replicates of the sampled sides
  std::vector<double> maxima(opt.bootstrap);
  for_each_index(static_cast<std::size_t>(opt.bootstrap), opt.exec, [&](std::size_t b) {
    Rng rng = make_stream(derive_seed(opt.seed, 3), b);
    std::vector<std::size_t> pick_xi, pick_eta;
    if (!xi_exact)
      for (std::uint64_t t = 0; t < opt.reps; ++t) pick_xi.push_back(rng() % opt.reps);
    if (!eta_exact)
      for (std::uint64_t t = 0; t < opt.reps; ++t) pick_eta.push_back(rng() % opt.reps);
    double best = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      const LatticePmf a = xi_exact ? xi_law[p] : law_of(xi_draws.counts[p], partitions[p].dim(), &pick_xi);
      const LatticePmf c = eta_exact ? eta_law[p] : law_of(eta_draws.counts[p], partitions[p].dim(), &pick_eta);
      best = std::max(best, wasserstein_l1(a, c).value);
    }
    maxima[b] = best;
  });
  out.std_error = sample_sd(maxima);
  return out;
}

double tuple_sum_bound(const std::vector<PrefixTerms>& prefixes) {
  ExactSum acc;
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    const PrefixTerms& t = prefixes[i];
    if (t.abs_z_means.size() != i + 1 || t.q.dim != static_cast<int>(i) + 1)
      throw ParameterError("tuple bound: prefix " + std::to_string(i + 1) + " has tables of the wrong length");
    acc += t.q.abs_sum();
    ExactSum z;
    for (double v : t.abs_z_means) z += v;
    acc.add_product(2.0 * t.lambda_last, z.value());
  }
  return acc.value();
}

std::vector<PrefixTerms> prefix_terms(const LatticePmf& counts, const std::vector<double>& lambdas,
                                      const std::vector<CouplingTable>& couplings) {
  const int d = counts.dim();
  if (static_cast<int>(lambdas.size()) != d || static_cast<int>(couplings.size()) != d)
    throw ParameterError("tuple bound: need one mean and one coupling per set");
  std::vector<PrefixTerms> out(d);
  for (int i = 0; i < d; ++i) {
    const LatticePmf prefix = counts.prefix_marginal(i + 1);
    out[i].lambda_last = lambdas[i];
    out[i].q = q_terms_from_coupling(prefix, lambdas[i], couplings[i]);
    out[i].abs_z_means = couplings[i].abs_z_means();
  }
  return out;
}

}  // namespace pal
