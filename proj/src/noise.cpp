#include "fbmlab/mvn/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fbmlab {

namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double distance_to_nearest(const std::vector<double> &foci, double x) {
  if (foci.empty())
    return std::numeric_limits<double>::infinity();
  auto it = std::lower_bound(foci.begin(), foci.end(), x);
  double d = std::numeric_limits<double>::infinity();
  if (it != foci.end())
    d = *it - x;
  if (it != foci.begin())
    d = std::min(d, x - *(it - 1));
  return d;
}

} // namespace

ResolutionPolicy policy_for_queries(
    HurstIndex H, double alpha,
    const std::vector<std::pair<double, double>> &queries) {
  ResolutionPolicy pol;
  double h_min = std::numeric_limits<double>::infinity();
  for (const auto &[t, h] : queries) {
    pol.required.push_back(t);
    pol.required.push_back(t + h);
    if (!H.is_brownian()) {
      pol.required.push_back(t - std::pow(h, alpha));
      pol.foci.push_back(t);
      pol.foci.push_back(t + h);
    }
    h_min = std::min(h_min, h);
  }
  pol.min_cell = std::min(1e-8, h_min / 64);
  return pol;
}

NoisePartition::NoisePartition(const MvnCalibration &calib, double T_max,
                               const ResolutionPolicy &policy) {
  if (!(T_max > 0))
    throw InvalidArgument("noise partition needs T_max > 0");
  if (!(policy.growth > 0) || !(policy.min_cell > 0) ||
      !(policy.xi_growth > 0) || !(policy.xi_min_cell > 0))
    throw InvalidArgument("resolution policy needs positive growth and cells");
  const std::vector<double> foci = sorted_unique(policy.foci);
  std::vector<double> req = policy.required;
  req.insert(req.end(), foci.begin(), foci.end());
  req.push_back(T_max);
  req = sorted_unique(req);
  for (double r : req) {
    if (r < 0 || r > T_max) {
      std::ostringstream os;
      os << "required edge " << r << " outside [0, " << T_max << "]";
      throw RangeError(os.str());
    }
  }
  t_edges_.push_back(0.0);
  std::size_t ri = 0;
  while (ri < req.size() && req[ri] <= 0)
    ++ri;
  double x = 0;
  while (x < T_max) {
    const double ell =
        std::max(policy.min_cell, policy.growth * distance_to_nearest(foci, x));
    const double r = req[ri];
    double next;
    if (r - x <= 1.5 * ell) {
      next = r;
      ++ri;
    } else {
      next = x + ell;
    }
    t_edges_.push_back(next);
    x = next;
  }

  const double S = calib.s_max_for(T_max);
  if (S > 0) {
    s_edges_.push_back(0.0);
    double s = 0;
    while (s < S) {
      const double ell = std::max(policy.xi_min_cell, policy.xi_growth * s);
      const double next = (S - s <= 1.5 * ell) ? S : s + ell;
      s_edges_.push_back(next);
      s = next;
    }
  }
}

Eigen::Index NoisePartition::xit_edge_index(double x) const {
  auto it = std::lower_bound(t_edges_.begin(), t_edges_.end(), x);
  if (it == t_edges_.end() || *it != x)
    return -1;
  return static_cast<Eigen::Index>(it - t_edges_.begin());
}

Eigen::Index NoisePartition::xit_first_cell_at_or_after(double x) const {
  auto it = std::lower_bound(t_edges_.begin(), t_edges_.end() - 1, x);
  return static_cast<Eigen::Index>(it - t_edges_.begin());
}

NoiseGrid sample_noise(std::shared_ptr<const NoisePartition> partition,
                       RngStream &rng) {
  NoiseGrid g;
  const auto &te = partition->xit_edges();
  const auto &se = partition->xi_edges();
  g.xit.resize(partition->xit_cells());
  for (Eigen::Index i = 0; i < g.xit.size(); ++i)
    g.xit[i] = std::sqrt(te[i + 1] - te[i]) * rng.normal();
  g.xi.resize(partition->xi_cells());
  for (Eigen::Index i = 0; i < g.xi.size(); ++i)
    g.xi[i] = std::sqrt(se[i + 1] - se[i]) * rng.normal();
  g.seed = rng.seed();
  g.partition = std::move(partition);
  return g;
}

NoiseGrid sample_noise(const MvnCalibration &calib, double T_max,
                       const ResolutionPolicy &policy, RngStream &rng) {
  return sample_noise(std::make_shared<NoisePartition>(calib, T_max, policy),
                      rng);
}

double xit_weight(double p, double tau, double a, double b) {
  if (a >= tau)
    return 0.0;
  const double bb = std::min(b, tau);
  const double len = b - a;
  if (p == 0)
    return bb == b ? 1.0 : (bb - a) / len;
  const double q = p + 1.0;
  return pow_diff(tau - bb, bb - a, q) / (q * len);
}

double xi_weight(double p, double tau, double a, double b) {
  if (p == 0)
    return 0.0;
  const double len = b - a;
  const double q = p + 1.0;
  return (pow_diff(tau + a, len, q) - pow_diff(a, len, q)) / (q * len);
}

double LinearFunctional::unit_sum(const NoiseGrid &noise) const {
  double s = 0.0;
  for (Eigen::Index i = unit_begin; i < unit_end; ++i)
    s += noise.xit[i];
  return s;
}

double LinearFunctional::weighted_sum(const NoiseGrid &noise,
                                      double unit_part) const {
  double s = unit_part;
  for (std::size_t k = 0; k < xit_index.size(); ++k)
    s += xit_weight[k] * noise.xit[xit_index[k]];
  for (std::size_t k = 0; k < xi_index.size(); ++k)
    s += xi_weight[k] * noise.xi[xi_index[k]];
  return s;
}

double LinearFunctional::variance(const NoisePartition &partition) const {
  const auto &te = partition.xit_edges();
  const auto &se = partition.xi_edges();
  double v = 0;
  for (Eigen::Index i = unit_begin; i < unit_end; ++i)
    v += te[i + 1] - te[i];
  for (std::size_t k = 0; k < xit_index.size(); ++k) {
    const auto i = xit_index[k];
    v += xit_weight[k] * xit_weight[k] * (te[i + 1] - te[i]);
  }
  for (std::size_t k = 0; k < xi_index.size(); ++k) {
    const auto i = xi_index[k];
    v += xi_weight[k] * xi_weight[k] * (se[i + 1] - se[i]);
  }
  return scale * scale * v;
}

LinearFunctional path_functional(const MvnCalibration &calib,
                                 const NoisePartition &partition, double t) {
  if (!(t >= 0) || t > partition.T_max()) {
    std::ostringstream os;
    os << "time " << t << " outside noise coverage [0, " << partition.T_max()
       << "]";
    throw RangeError(os.str());
  }
  const double p = calib.hurst.kernel_exponent();
  LinearFunctional f;
  f.scale = calib.K_H;
  const auto &te = partition.xit_edges();
  for (Eigen::Index i = 0; i < partition.xit_cells() && te[i] < t; ++i) {
    f.xit_index.push_back(i);
    f.xit_weight.push_back(xit_weight(p, t, te[i], te[i + 1]));
  }
  if (p != 0 && t > 0) {
    const auto &se = partition.xi_edges();
    for (Eigen::Index i = 0; i < partition.xi_cells(); ++i) {
      f.xi_index.push_back(i);
      f.xi_weight.push_back(xi_weight(p, t, se[i], se[i + 1]));
    }
  }
  return f;
}

double mvn_B(const NoiseGrid &noise, const MvnCalibration &calib, double t) {
  if (t == 0)
    return 0.0;
  return path_functional(calib, *noise.partition, t).apply(noise);
}

double mvn_variance(const MvnCalibration &calib,
                    const NoisePartition &partition, double t) {
  return path_functional(calib, partition, t).variance(partition);
}

} // namespace fbmlab
