#include "pal/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "pal/errors.hpp"
#include "pal/exact_sum.hpp"
#include "pal/poisson.hpp"

namespace pal {

MeanSe mean_and_se(std::span<const double> xs) {
  if (xs.empty()) return {};
  CompensatedSum s;
  for (double x : xs) s += x;
  const double mean = s.value() / static_cast<double>(xs.size());
  return {mean, sample_sd(xs) / std::sqrt(static_cast<double>(xs.size()))};
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  CompensatedSum s;
  for (double x : xs) s += x;
  const double mean = s.value() / static_cast<double>(xs.size());
  CompensatedSum ss;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss.value() / static_cast<double>(xs.size() - 1));
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> probs,
                               double min_expected) {
  if (observed.size() != probs.size() || observed.empty()) throw ParameterError("chi-square: size mismatch");
  double n = 0.0;
  for (auto o : observed) n += static_cast<double>(o);
  if (n == 0.0) throw ParameterError("chi-square: no observations");
  // pool cells from the right into bins with enough expected mass
  std::vector<double> obs, exp;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t k = observed.size(); k-- > 0;) {
    o_acc += static_cast<double>(observed[k]);
    e_acc += n * probs[k];
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (!obs.empty()) {
    obs.back() += o_acc;
    exp.back() += e_acc;
  } else {
    obs.push_back(o_acc);
    exp.push_back(e_acc);
  }
  ChiSquareResult r;
  for (std::size_t k = 0; k < obs.size(); ++k) r.statistic += (obs[k] - exp[k]) * (obs[k] - exp[k]) / exp[k];
  r.dof = static_cast<int>(obs.size()) - 1;
  if (r.dof < 1) {
    r.p_value = 1.0;
    return r;
  }
  boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

ChiSquareResult chi_square_poisson(std::span<const long> samples, double mean, double min_expected) {
  if (samples.empty()) throw ParameterError("chi-square: no observations");
  const long top = std::max(*std::max_element(samples.begin(), samples.end()),
                            static_cast<long>(poisson_truncation_point(mean, 1e-12)));
  std::vector<std::uint64_t> obs(top + 1, 0);
  for (long s : samples) {
    if (s < 0) throw ParameterError("chi-square: negative count");
    ++obs[s];
  }
  std::vector<double> probs = poisson_pmf_table(mean, static_cast<int>(top));
  // last cell carries the upper tail
  probs.back() += poisson_upper_tail(mean, static_cast<int>(top));
  return chi_square_gof(obs, probs, min_expected);
}

}  // namespace pal
