#include "pal/poisson.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "pal/errors.hpp"

namespace pal {

double poisson_pmf(double lambda, int k) {
  if (k < 0) return 0.0;
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

double poisson_upper_tail(double lambda, int n) {
  if (n < 0) return 1.0;
  if (lambda == 0.0) return 0.0;
  // P(P > n) = P(Gamma(n + 1) < lambda)
  return boost::math::gamma_p(n + 1.0, lambda);
}

int poisson_truncation_point(double lambda, double eps) {
  if (!(eps > 0.0)) throw ParameterError("truncation eps must be positive");
  if (lambda == 0.0) return 0;
  int n = static_cast<int>(std::floor(lambda));
  while (poisson_upper_tail(lambda, n) > eps) {
    ++n;
    if (n == std::numeric_limits<int>::max()) throw CapacityError("Poisson truncation overflow");
  }
  // walk back in case the floor already overshot (tiny eps never does, large eps may)
  while (n > 0 && poisson_upper_tail(lambda, n - 1) <= eps) --n;
  return n;
}

double poisson_tail_moment(double lambda, int n) {
  if (lambda == 0.0) return 0.0;
  return lambda * poisson_upper_tail(lambda, n - 1);
}

double poisson_excess_mean(double lambda, int n) {
  // E[(P-n)^+] = lambda P(P >= n) - n P(P > n)
  if (lambda == 0.0) return 0.0;
  if (n <= 0) return lambda - n;
  const double v = lambda * poisson_upper_tail(lambda, n - 1) - n * poisson_upper_tail(lambda, n);
  return v > 0.0 ? v : 0.0;
}

std::vector<double> poisson_pmf_table(double lambda, int n_max) {
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  for (int k = 0; k <= n_max; ++k) out[k] = poisson_pmf(lambda, k);
  return out;
}

}  // namespace pal
