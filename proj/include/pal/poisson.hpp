#pragma once

#include <vector>

namespace pal {

/// P(Poisson(lambda) = k).
double poisson_pmf(double lambda, int k);

/// P(Poisson(lambda) > n), accurate in the relative sense deep in the tail.
double poisson_upper_tail(double lambda, int n);

/// Smallest n with P(Poisson(lambda) > n) <= eps.
int poisson_truncation_point(double lambda, double eps);

/// E[P ; P > n] = lambda * P(P >= n).
double poisson_tail_moment(double lambda, int n);

/// E[(P - n)^+].
double poisson_excess_mean(double lambda, int n);

/// pmf on 0..n_max.
std::vector<double> poisson_pmf_table(double lambda, int n_max);

}  // namespace pal
