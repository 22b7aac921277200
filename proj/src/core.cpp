#include "fbmlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace fbmlab {

HurstIndex::HurstIndex(double value) : value_(value) {
  if (!(value >= kMin && value <= kMax)) {
    std::ostringstream os;
    os << "Hurst index " << value << " outside [" << kMin << ", " << kMax
       << "]";
    throw InvalidArgument(os.str());
  }
}

TimeGrid::TimeGrid(Eigen::VectorXd points) : points_(std::move(points)) {
  if (points_.size() < 1)
    throw InvalidArgument("time grid needs at least one point");
  if (!(points_[0] >= 0))
    throw InvalidArgument("time grid points must be nonnegative");
  for (Eigen::Index i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i]))
      throw InvalidArgument("time grid points must be finite");
    if (i > 0 && !(points_[i] > points_[i - 1])) {
      std::ostringstream os;
      os << "time grid not strictly increasing at index " << i;
      throw InvalidArgument(os.str());
    }
  }
}

TimeGrid TimeGrid::uniform(double t0, double dt, Eigen::Index n) {
  if (!(dt > 0) || n < 1)
    throw InvalidArgument("uniform grid needs dt > 0 and n >= 1");
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i)
    p[i] = t0 + static_cast<double>(i) * dt;
  return TimeGrid(std::move(p));
}

TimeGrid TimeGrid::geometric(double lo, double hi, Eigen::Index n) {
  if (!(lo > 0) || !(hi > lo) || n < 1)
    throw InvalidArgument("geometric grid needs 0 < lo < hi and n >= 1");
  Eigen::VectorXd p(n + 1);
  const double lr = std::log(hi / lo);
  for (Eigen::Index i = 0; i <= n; ++i)
    p[i] = lo * std::exp(lr * static_cast<double>(i) / static_cast<double>(n));
  p[0] = lo;
  p[n] = hi;
  return TimeGrid(std::move(p));
}

bool TimeGrid::is_geometric(double rel_tol) const {
  if (points_.size() < 2)
    return points_[0] > 0;
  if (!(points_[0] > 0))
    return false;
  const double r = points_[1] / points_[0];
  for (Eigen::Index i = 2; i < points_.size(); ++i) {
    if (std::abs(points_[i] / points_[i - 1] - r) > rel_tol * r)
      return false;
  }
  return true;
}

const char *to_string(GeneratorTag tag) {
  switch (tag) {
  case GeneratorTag::cholesky:
    return "cholesky";
  case GeneratorTag::circulant:
    return "circulant";
  case GeneratorTag::mvn:
    return "mvn";
  }
  return "unknown";
}

Eigen::VectorXd anchored_ladder(const Eigen::VectorXd &anchors,
                                double points_per_decade) {
  if (anchors.size() < 1)
    throw InvalidArgument("ladder needs at least one anchor");
  if (!(points_per_decade > 0))
    throw InvalidArgument("points_per_decade must be positive");
  std::vector<double> a(anchors.data(), anchors.data() + anchors.size());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  if (!(a.front() > 0))
    throw InvalidArgument("ladder anchors must be positive");
  std::vector<double> out{a.front()};
  for (std::size_t k = 1; k < a.size(); ++k) {
    const double lo = a[k - 1], hi = a[k];
    const double decades = std::log10(hi / lo);
    const auto n = std::max<long>(
        1, static_cast<long>(std::ceil(points_per_decade * decades - 1e-9)));
    const double lr = std::log(hi / lo);
    for (long i = 1; i < n; ++i)
      out.push_back(lo * std::exp(lr * static_cast<double>(i) /
                                  static_cast<double>(n)));
    out.push_back(hi);
  }
  return Eigen::Map<Eigen::VectorXd>(out.data(),
                                     static_cast<Eigen::Index>(out.size()));
}

Eigen::VectorXd geometric_ladder(double lo, double hi,
                                 double points_per_decade) {
  if (!(lo > 0) || !(hi >= lo))
    throw InvalidArgument("geometric ladder needs 0 < lo <= hi");
  Eigen::VectorXd anchors(2);
  anchors << lo, hi;
  return anchored_ladder(anchors, points_per_decade);
}

} // namespace fbmlab
