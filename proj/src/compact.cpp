#include "fbmlab/slowset/compact.hpp"

#include "fbmlab/core.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>

namespace fbmlab {

const char *to_string(CompactKind kind) {
  switch (kind) {
  case CompactKind::interval:
    return "interval";
  case CompactKind::ifs_cantor:
    return "ifs_cantor";
  case CompactKind::finite_union:
    return "finite_union";
  }
  return "unknown";
}

bool CompactSetSpec::contains(double t, double tol) const {
  auto it = std::upper_bound(
      pieces.begin(), pieces.end(), t,
      [](double v, const Interval &p) { return v < p.lo; });
  if (it != pieces.end() && it->lo - tol <= t)
    return true;
  if (it == pieces.begin())
    return false;
  --it;
  return t <= it->hi + tol;
}

CompactSetSpec make_interval(double a, double b, int atoms) {
  if (!(a >= 0) || !(b >= a) || !std::isfinite(b))
    throw InvalidArgument("interval needs 0 <= a <= b");
  if (atoms < 1)
    throw InvalidArgument("interval measure needs at least one atom");
  CompactSetSpec K;
  K.kind = CompactKind::interval;
  K.pieces.push_back({a, b});
  const double dim = b > a ? 1.0 : 0.0;
  K.known_hausdorff_dim = K.known_minkowski_dim = dim;
  if (b == a) {
    K.natural_measure.push_back({a, 1.0});
  } else {
    for (int i = 0; i < atoms; ++i)
      K.natural_measure.push_back(
          {a + (b - a) * (i + 0.5) / atoms, 1.0 / atoms});
  }
  return K;
}

CompactSetSpec make_cantor(int m, double r, int depth, double a, double b) {
  if (m < 2)
    throw InvalidArgument("Cantor set needs at least two maps");
  if (!(r > 0 && r < 1))
    throw InvalidArgument("Cantor ratio must lie in (0,1)");
  if (m * r > 1 + 1e-12) {
    std::ostringstream os;
    os << "IFS maps overlap: m * r = " << m * r << " > 1";
    throw InvalidArgument(os.str());
  }
  if (depth < 0 || depth > 14)
    throw InvalidArgument("Cantor depth must lie in [0, 14]");
  if (!(a >= 0) || !(b > a))
    throw InvalidArgument("Cantor base interval needs 0 <= a < b");
  const double count = std::pow(static_cast<double>(m), depth);
  if (count > 1 << 22)
    throw InvalidArgument("Cantor representation too large");
  // Offsets in [0,1] of the depth-d cylinders, built level by level.
  std::vector<double> offs{0.0};
  double scale = 1.0;
  const double step = (1 - r) / (m - 1);
  for (int d = 0; d < depth; ++d) {
    std::vector<double> next;
    next.reserve(offs.size() * static_cast<std::size_t>(m));
    for (double o : offs)
      for (int i = 0; i < m; ++i)
        next.push_back(o + scale * i * step);
    offs.swap(next);
    scale *= r;
  }
  CompactSetSpec K;
  K.kind = CompactKind::ifs_cantor;
  K.maps = m;
  K.ratio = r;
  K.depth = depth;
  const double L = b - a;
  K.known_hausdorff_dim = K.known_minkowski_dim =
      std::log(static_cast<double>(m)) / std::log(1.0 / r);
  K.resolution = L * scale;
  const double w = 1.0 / static_cast<double>(offs.size());
  for (double o : offs) {
    const double lo = a + L * o, hi = a + L * (o + scale);
    if (!K.pieces.empty() && lo <= K.pieces.back().hi)
      K.pieces.back().hi = hi;
    else
      K.pieces.push_back({lo, hi});
    K.natural_measure.push_back({a + L * (o + 0.5 * scale), w});
  }
  return K;
}

CompactSetSpec make_union(const std::vector<CompactSetSpec> &parts) {
  if (parts.empty())
    throw InvalidArgument("union needs at least one component");
  CompactSetSpec K;
  K.kind = CompactKind::finite_union;
  const double share = 1.0 / static_cast<double>(parts.size());
  for (const auto &p : parts) {
    K.pieces.insert(K.pieces.end(), p.pieces.begin(), p.pieces.end());
    for (const auto &at : p.natural_measure)
      K.natural_measure.push_back({at.point, at.weight * share});
    K.known_hausdorff_dim = std::max(K.known_hausdorff_dim, p.known_hausdorff_dim);
    K.known_minkowski_dim = std::max(K.known_minkowski_dim, p.known_minkowski_dim);
    K.resolution = std::max(K.resolution, p.resolution);
  }
  std::sort(K.pieces.begin(), K.pieces.end(),
            [](const Interval &x, const Interval &y) { return x.lo < y.lo; });
  for (std::size_t i = 1; i < K.pieces.size(); ++i)
    if (K.pieces[i].lo <= K.pieces[i - 1].hi)
      throw InvalidArgument("union components must be disjoint");
  std::sort(K.natural_measure.begin(), K.natural_measure.end(),
            [](const Atom &x, const Atom &y) { return x.point < y.point; });
  return K;
}

std::size_t packing_number(const CompactSetSpec &K, double h) {
  if (!(h > 0))
    throw InvalidArgument("packing_number needs h > 0");
  if (K.resolution > 2 * h * (1 + 1e-9)) {
    std::ostringstream os;
    os << "set representation (pieces of length " << K.resolution
       << ") is coarser than the scale h = " << h;
    throw RangeError(os.str());
  }
  const double eps = 1e-9 * h;
  std::size_t count = 0;
  double cover = -std::numeric_limits<double>::infinity();
  for (const auto &p : K.pieces) {
    if (p.hi <= cover + eps)
      continue;
    const double x = p.lo > cover + eps ? p.lo : cover;
    const double n_real = (p.hi - x) / (2 * h) - 1e-9;
    const std::size_t n =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(n_real)));
    count += n;
    cover = x + 2 * h * static_cast<double>(n);
  }
  return count;
}

ExponentFit minkowski_dim_fit(const CompactSetSpec &K,
                              const std::vector<double> &h_ladder) {
  if (h_ladder.size() < 3)
    throw InvalidArgument("minkowski_dim_fit needs at least 3 ladder points");
  ExponentFit fit;
  fit.method_tag = "packing_ols";
  for (double h : h_ladder) {
    const double c = static_cast<double>(packing_number(K, h));
    fit.points.push_back(
        {h, std::log(1.0 / h), std::log(c), 0.0, 0.0, 0.0, c, 0.0, 0.0, {0, 0}});
  }
  fit_points(fit, false);
  return fit;
}

} // namespace fbmlab
