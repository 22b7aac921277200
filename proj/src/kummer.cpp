#include "fbmlab/exponent/kummer.hpp"

#include <cmath>
#include <sstream>

namespace fbmlab {

KummerRoot lambda_exact_bm(double theta) {
  if (!(theta >= 0.2 && theta <= 4.0)) {
    std::ostringstream os;
    os << "theta = " << theta << " outside the supported range [0.2, 4]";
    throw RangeError(os.str());
  }
  const double z = 0.5 * theta * theta;
  auto f = [z](double lam) { return kummer_M<double>(-lam, 0.5, z); };

  // Scan from lambda = 0, where M = 1, for the first sign change.
  constexpr double kStep = 0.05;
  constexpr int kSteps = 1000; // up to lambda = 50
  double lo = 0.0, flo = f(0.0);
  double hi = 0.0, fhi = flo;
  bool found = false;
  for (int k = 1; k <= kSteps; ++k) {
    hi = k * kStep;
    fhi = f(hi);
    if (fhi == 0.0)
      return KummerRoot{theta, hi, 0.0, {lo, hi}};
    if ((fhi < 0) != (flo < 0)) {
      found = true;
      break;
    }
    lo = hi;
    flo = fhi;
  }
  if (!found) {
    std::ostringstream os;
    os << "no sign change of M(-lambda, 1/2, " << z << ") in (0, 50]";
    throw RangeError(os.str());
  }
  const Interval bracket{lo, hi};

  // Illinois-style regula falsi: secant steps that never leave the bracket.
  double a = lo, fa = flo, b = hi, fb = fhi;
  int side = 0;
  double x = 0.5 * (a + b), fx = f(x);
  for (int it = 0; it < 200; ++it) {
    x = (a * fb - b * fa) / (fb - fa);
    if (!(x > a && x < b))
      x = 0.5 * (a + b);
    fx = f(x);
    if (fx == 0.0 || (b - a) < 1e-15 * b)
      break;
    if ((fx < 0) == (fb < 0)) {
      b = x;
      fb = fx;
      if (side == -1)
        fa *= 0.5;
      side = -1;
    } else {
      a = x;
      fa = fx;
      if (side == 1)
        fb *= 0.5;
      side = 1;
    }
    if (std::abs(fx) < 1e-14 && (b - a) < 1e-12 * b)
      break;
  }
  if (!(std::abs(fx) < 1e-10)) {
    std::ostringstream os;
    os << "Kummer root refinement stalled with residual " << fx;
    throw ConvergenceError(os.str(), std::abs(fx));
  }
  return KummerRoot{theta, x, fx, bracket};
}

double theta_for_lambda_exact_bm(double lambda) {
  double lo = 0.2, hi = 4.0;
  const double llo = lambda_exact_bm(lo).lambda_value;
  const double lhi = lambda_exact_bm(hi).lambda_value;
  if (!(lambda <= llo && lambda >= lhi)) {
    std::ostringstream os;
    os << "lambda = " << lambda << " outside [" << lhi << ", " << llo << "]";
    throw RangeError(os.str());
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lambda_exact_bm(mid).lambda_value > lambda)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace fbmlab
