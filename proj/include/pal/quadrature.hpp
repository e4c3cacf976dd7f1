#pragma once

#include <functional>
#include <span>

#include "pal/geometry.hpp"

namespace pal {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
};

/// Globally adaptive Gauss-Kronrod (15/31) on [a, b], starting from the
/// pieces cut at `breaks` (kinks of f); splits the worst piece until the
/// summed error estimate drops below max(abs_tol, rel_tol * |value|).
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                     double abs_tol = 1e-13, std::span<const double> breaks = {});

/// Iterated integral over a box of dimension 1 or 2.
QuadResult integrate_box(const std::function<double(std::span<const double>)>& f, const Box& box,
                         double rel_tol = 1e-10, double abs_tol = 1e-13);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

}  // namespace pal
