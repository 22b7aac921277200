#pragma once

#include <cmath>
#include <sstream>

#include "fbmlab/core.hpp"
#include "fbmlab/stats.hpp"

namespace fbmlab {

// Confluent hypergeometric M(a, b, z) = sum_n (a)_n z^n / ((b)_n n!).
template <class Scalar> Scalar kummer_M(Scalar a, Scalar b, Scalar z) {
  using std::abs;
  using std::floor;
  if (b <= Scalar(0) && b == floor(b))
    throw InvalidArgument("kummer_M: b must not be a nonpositive integer");
  Scalar term(1), sum(1), abs_sum(1);
  // Past this index the term ratio stays below one in magnitude.
  const Scalar settle = abs(a) + abs(b) + Scalar(2) * abs(z) + Scalar(2);
  for (int n = 0; n < 10000; ++n) {
    const Scalar an = a + Scalar(n);
    if (an == Scalar(0))
      return sum;
    term *= an * z / ((b + Scalar(n)) * Scalar(n + 1));
    sum += term;
    abs_sum += abs(term);
    if (Scalar(n) > settle && abs(term) <= Scalar(1e-14) * abs_sum)
      return sum;
  }
  std::ostringstream os;
  os << "kummer_M series did not converge within 10000 terms";
  throw ConvergenceError(os.str(), static_cast<double>(abs(term)));
}

struct KummerRoot {
  double theta;
  double lambda_value;
  double residual;
  Interval bracket;
};

// Smallest lambda > 0 with M(-lambda, 1/2, theta^2/2) = 0: the crossing
// exponent of Brownian motion for the boundary theta sqrt(s).
KummerRoot lambda_exact_bm(double theta);

// theta with lambda_exact_bm(theta) = lambda, by bisection on [0.2, 4].
double theta_for_lambda_exact_bm(double lambda);

} // namespace fbmlab
