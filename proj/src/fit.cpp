#include "fbmlab/fit.hpp"

#include "fbmlab/core.hpp"

#include <cmath>

namespace fbmlab {

const char *to_string(FitStatus status) {
  switch (status) {
  case FitStatus::ok:
    return "ok";
  case FitStatus::degenerate_zero:
    return "degenerate_zero";
  case FitStatus::empty:
    return "empty";
  }
  return "unknown";
}

LineFit weighted_line_fit(const std::vector<double> &x,
                          const std::vector<double> &y,
                          const std::vector<double> &sigma,
                          bool known_variance) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n || sigma.size() != n)
    throw InvalidArgument("line fit needs at least two matched points");
  double sw = 0, swx = 0, swy = 0;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sigma[i] > 0))
      throw InvalidArgument("line fit needs positive sigmas");
    w[i] = 1.0 / (sigma[i] * sigma[i]);
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  const double xbar = swx / sw, ybar = swy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  if (!(sxx > 0))
    throw InvalidArgument("line fit needs at least two distinct abscissae");
  LineFit f{};
  f.slope = sxy / sxx;
  f.intercept = ybar - f.slope * xbar;
  double chi2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    chi2 += w[i] * r * r;
  }
  f.residual_scale = n > 2 ? std::sqrt(chi2 / static_cast<double>(n - 2)) : 0;
  f.slope_stderr = known_variance ? std::sqrt(1.0 / sxx)
                                  : f.residual_scale * std::sqrt(1.0 / sxx);
  return f;
}

void fit_points(ExponentFit &fit, bool weighted, double ci_inflation) {
  std::vector<double> x, y, s;
  for (const auto &p : fit.points) {
    x.push_back(p.x);
    y.push_back(p.y);
    s.push_back(weighted ? p.sigma : 1.0);
  }
  const LineFit lf = weighted_line_fit(x, y, s, weighted);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.std_error = lf.slope_stderr * ci_inflation;
  const double half = 1.959963984540054 * fit.std_error;
  fit.ci95 = {fit.slope - half, fit.slope + half};
  fit.diagnostics["residual_scale"] = lf.residual_scale;
}

} // namespace fbmlab
