#include "fbmlab/mvn/calibration.hpp"

#include "fbmlab/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace fbmlab {

double pow_diff(double u, double d, double q) {
  if (d == 0)
    return 0.0;
  if (u == 0)
    return std::pow(d, q);
  return std::pow(u, q) * std::expm1(q * std::log1p(d / u));
}

double xi_tail_integral(double p, double t, double S) {
  if (!(S >= 4 * t) || !(t > 0))
    throw InvalidArgument("xi_tail_integral needs S >= 4 t > 0");
  constexpr int kTerms = 80;
  double binom[kTerms];
  binom[0] = 1.0;
  for (int k = 1; k < kTerms; ++k)
    binom[k] = binom[k - 1] * (p - k + 1) / k;
  double total = 0;
  const double r = t / S;
  for (int j = 2; j < kTerms; ++j) {
    double c = 0;
    for (int k = 1; k < j; ++k)
      c += binom[k] * binom[j - k];
    const double term =
        c * std::pow(r, j) * std::pow(S, 2 * p + 1) / (j - 1 - 2 * p);
    total += term;
    if (std::abs(term) < 1e-18 * std::abs(total))
      break;
  }
  return total;
}

double MvnCalibration::s_max_for(double t_max) const {
  if (S_max == 0)
    return 0;
  return S_max * std::pow(std::max(1.0, t_max), 1.0 / (1.0 - hurst.value()));
}

MvnCalibration calibrate_KH(HurstIndex H, double tolerance,
                            const CalibrationOptions &opt) {
  if (!(tolerance >= 1e-8))
    throw InvalidArgument("calibrate_KH needs tolerance >= 1e-8");
  const double h = H.value();
  const double p = H.kernel_exponent();
  if (H.is_brownian())
    return MvnCalibration{H, 1.0, tolerance, 0.0, 0.0, 0.0, 0.0};

  auto g = [p](double s) { return pow_diff(s, 1.0, p); };

  // [0, 1]: for p < 0 the substitution s = u^{1/(2H)} removes the s^{2p}
  // endpoint singularity.
  QuadratureResult near;
  if (p < 0) {
    const double gam = 1.0 / (2.0 * h);
    near = integrate(
        [&](double u) {
          const double s = std::pow(u, gam);
          const double v = g(s);
          return v * v * gam * std::pow(u, gam - 1.0);
        },
        0.0, 1.0, tolerance / 10, 0.0, opt.panels);
  } else {
    near = integrate(
        [&](double s) {
          const double v = g(s);
          return v * v;
        },
        0.0, 1.0, tolerance / 10, 0.0, opt.panels);
  }
  // [1, 64] on a log scale, then the series tail.
  constexpr double kSplit = 64.0;
  const QuadratureResult mid = integrate(
      [&](double v) {
        const double s = std::exp(v);
        const double gv = g(s);
        return gv * gv * s;
      },
      0.0, std::log(kSplit), tolerance / 10, 0.0, opt.panels);
  const double tail = xi_tail_integral(p, 1.0, kSplit);
  const double err = near.error + mid.error;
  if (!near.converged || !mid.converged || err > tolerance) {
    std::ostringstream os;
    os << "kernel quadrature did not converge for H=" << h
       << ", achieved error " << err;
    throw ConvergenceError(os.str(), err);
  }
  const double integral = near.value + mid.value + tail;
  const double K = 1.0 / std::sqrt(integral + 1.0 / (2.0 * h));

  double S = 4.0;
  double tail_var = K * K * xi_tail_integral(p, 1.0, S);
  while (tail_var > opt.tail_tolerance) {
    S *= 2.0;
    tail_var = K * K * xi_tail_integral(p, 1.0, S);
  }
  return MvnCalibration{H, K, tolerance, S, integral, err, tail_var};
}

} // namespace fbmlab
