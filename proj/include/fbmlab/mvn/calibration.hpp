#pragma once

#include "fbmlab/core.hpp"

namespace fbmlab {

struct CalibrationOptions {
  // Initial panel count for each quadrature segment; doubling it is the
  // resolution-refinement check.
  int panels = 8;
  // Allowed variance of B(1) lost by truncating the xi noise at S_max.
  double tail_tolerance = 1e-5;
};

struct MvnCalibration {
  HurstIndex hurst;
  double K_H;
  double quadrature_tolerance;
  double S_max;                // xi truncation for T_max = 1
  double kernel_integral;      // int_0^inf ((1+s)^p - s^p)^2 ds
  double quadrature_error;
  double tail_variance;        // K_H^2 * int_{S_max}^inf (...)^2 ds

  // Truncation point that keeps the neglected variance of B(t_max) below the
  // same tolerance.
  double s_max_for(double t_max) const;
};

MvnCalibration calibrate_KH(HurstIndex H, double tolerance,
                            const CalibrationOptions &opt = {});

// (u + d)^q - u^q without cancellation for d << u.
double pow_diff(double u, double d, double q);

// int_S^inf ((t+s)^p - s^p)^2 ds by its large-s series (S >= 4 t).
double xi_tail_integral(double p, double t, double S);

} // namespace fbmlab
