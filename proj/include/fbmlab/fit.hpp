#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

#include "fbmlab/stats.hpp"

namespace fbmlab {

enum class FitStatus { ok, degenerate_zero, empty };

const char *to_string(FitStatus status);

struct FitPoint {
  double abscissa;  // the raw scale (h, b, box size, ...)
  double x;         // regression abscissa
  double y;         // regression ordinate
  double sigma;     // standard error of y; 0 when unweighted
  double n_paths;   // ensemble size behind y (0 when deterministic)
  double survivors; // surviving paths (possibly fractional weights)
  double value = 0;     // the estimated quantity before taking logs
  double value_se = 0;  // its standard error
  double reference = 0; // analytic value of y when one is available
  Interval value_ci{0, 0};
};

struct ExponentFit {
  FitStatus status = FitStatus::ok;
  double slope = 0;
  double intercept = 0;
  double std_error = 0;
  Interval ci95{0, 0};
  std::vector<FitPoint> points;
  std::vector<FitPoint> dropped;
  std::string method_tag;
  std::map<std::string, double> diagnostics;

  bool contains(double value) const {
    return ci95.lo <= value && value <= ci95.hi;
  }
};

struct LineFit {
  double slope;
  double intercept;
  double slope_stderr;
  double residual_scale;
};

// Weighted least squares y = a + b x with weights 1/sigma^2. With
// known_variance the slope error comes from the weights alone; otherwise the
// residual scale is used (ordinary least squares when all sigma are 1).
LineFit weighted_line_fit(const std::vector<double> &x,
                          const std::vector<double> &y,
                          const std::vector<double> &sigma,
                          bool known_variance);

// Fits the points in place, filling slope, intercept, std_error and a normal 95%
// interval scaled by ci_inflation.
void fit_points(ExponentFit &fit, bool weighted, double ci_inflation = 1.0);

} // namespace fbmlab
