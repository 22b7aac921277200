#pragma once

#include <functional>

namespace fbmlab {

struct QuadratureResult {
  double value = 0;
  double error = 0;
  int evaluations = 0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod (7/15) on [a, b], starting from `panels` equal
// subintervals and bisecting the worst one until the summed error estimate is
// below max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const std::function<double(double)> &f, double a,
                           double b, double abs_tol, double rel_tol,
                           int panels = 1, int max_intervals = 4000);

} // namespace fbmlab
