#include "fbmlab/slowset/scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fbmlab {

namespace {

Eigen::Index grid_index(double x, double t0, double dt, const char *what) {
  const double r = (x - t0) / dt;
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-9 * std::max(1.0, std::abs(k)) || k < 0) {
    std::ostringstream os;
    os.precision(17);
    os << what << " " << x << " is not on the path grid";
    throw AlignmentError(os.str());
  }
  return static_cast<Eigen::Index>(k);
}

void finish_report(SlowScanReport &rep, const CompactSetSpec &K,
                   const std::vector<double> &thetas) {
  const Eigen::Index n = rep.t_grid.size();
  rep.in_K.assign(static_cast<std::size_t>(n), 0);
  double inf = std::numeric_limits<double>::infinity();
  bool any = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (K.contains(rep.t_grid[i], 1e-12)) {
      rep.in_K[static_cast<std::size_t>(i)] = 1;
      inf = std::min(inf, rep.statistic[i]);
      any = true;
    }
  }
  if (!any)
    throw RangeError("no scan grid point lies in K");
  rep.inf_over_K = inf;
  for (double th : thetas)
    rep.theta_level_sets[th] = rep.level_set(th);
}

} // namespace

std::vector<char> SlowScanReport::level_set(double theta) const {
  std::vector<char> out(in_K.size(), 0);
  for (std::size_t i = 0; i < in_K.size(); ++i)
    out[i] = in_K[i] && statistic[static_cast<Eigen::Index>(i)] <= theta;
  return out;
}

SlowScanReport scan_slow(const CompactSetSpec &K, HurstIndex H,
                         const FbmPath &path, const TimeGrid &t_grid,
                         const std::vector<double> &h_ladder,
                         const std::vector<double> &thetas) {
  if (h_ladder.empty())
    throw InvalidArgument("scan needs a nonempty h ladder");
  const TimeGrid &g = path.grid;
  if (g.size() < 2)
    throw InvalidArgument("scan needs a path with at least two points");
  const double t0 = g[0];
  const double dt = g[1] - g[0];
  const Eigen::Index last = g.size() - 1;
  if (std::abs(g[last] - (t0 + dt * static_cast<double>(last))) >
      1e-9 * dt * static_cast<double>(last))
    throw AlignmentError("scan needs a uniform path grid");
  std::vector<Eigen::Index> lag;
  std::vector<double> inv;
  for (double h : h_ladder) {
    if (!(h > 0))
      throw InvalidArgument("ladder values must be positive");
    lag.push_back(grid_index(t0 + h, t0, dt, "ladder step"));
    inv.push_back(std::pow(h, -H.value()));
  }
  SlowScanReport rep{t_grid, h_ladder, Eigen::VectorXd(t_grid.size()), {}, 0, {}};
  for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
    const Eigen::Index a = grid_index(t_grid[i], t0, dt, "scan time");
    double m = 0;
    for (std::size_t j = 0; j < lag.size(); ++j) {
      if (a + lag[j] > last)
        throw RangeError("t + h beyond the path");
      m = std::max(m, std::abs(path.values[a + lag[j]] - path.values[a]) * inv[j]);
    }
    rep.statistic[i] = m;
  }
  finish_report(rep, K, thetas);
  return rep;
}

SlowScanReport scan_slow(const CompactSetSpec &K, HurstIndex H,
                         const DecompositionPlan &plan, const NoiseGrid &noise,
                         const TimeGrid &t_grid,
                         const std::vector<double> &h_ladder,
                         const std::vector<double> &thetas) {
  const std::size_t nt = static_cast<std::size_t>(t_grid.size());
  const std::size_t nh = h_ladder.size();
  if (nh == 0 || plan.size() != nt * nh)
    throw AlignmentError("plan queries do not match the scan grid and ladder");
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < nh; ++j) {
      const auto &q = plan.query(i * nh + j);
      if (q.t != t_grid[static_cast<Eigen::Index>(i)] || q.h != h_ladder[j])
        throw AlignmentError("plan queries do not match the scan grid and ladder");
    }
  std::vector<double> inv;
  for (double h : h_ladder)
    inv.push_back(std::pow(h, -H.value()));
  std::vector<double> d;
  plan.evaluate_localized(noise, d);
  SlowScanReport rep{t_grid, h_ladder, Eigen::VectorXd(t_grid.size()), {}, 0, {}};
  for (std::size_t i = 0; i < nt; ++i) {
    double m = 0;
    for (std::size_t j = 0; j < nh; ++j)
      m = std::max(m, std::abs(d[i * nh + j]) * inv[j]);
    rep.statistic[static_cast<Eigen::Index>(i)] = m;
  }
  finish_report(rep, K, thetas);
  return rep;
}

SlowScanReport scan_slow(const CompactSetSpec &K, const MvnCalibration &calib,
                         double alpha, const TimeGrid &t_grid,
                         const std::vector<double> &h_ladder,
                         const std::vector<double> &thetas, RngStream &rng) {
  std::vector<std::pair<double, double>> ql;
  std::vector<LocalQuery> queries;
  double t_max = 0;
  for (Eigen::Index i = 0; i < t_grid.size(); ++i)
    for (double h : h_ladder) {
      ql.emplace_back(t_grid[i], h);
      queries.push_back({t_grid[i], h});
      t_max = std::max(t_max, t_grid[i] + h);
    }
  const ResolutionPolicy pol = policy_for_queries(calib.hurst, alpha, ql);
  auto partition = std::make_shared<NoisePartition>(calib, t_max, pol);
  const DecompositionPlan plan(calib, partition, alpha, queries,
                               DecompParts::localized);
  const NoiseGrid noise = sample_noise(partition, rng);
  return scan_slow(K, calib.hurst, plan, noise, t_grid, h_ladder, thetas);
}

std::size_t box_count(const TimeGrid &grid, const std::vector<char> &member,
                      double eps) {
  if (!(eps > 0))
    throw InvalidArgument("box size must be positive");
  const double t0 = grid[0];
  std::size_t count = 0;
  long prev = -1;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (!member[static_cast<std::size_t>(i)])
      continue;
    const long b = static_cast<long>(std::floor((grid[i] - t0) / eps + 1e-9));
    if (b != prev) {
      ++count;
      prev = b;
    }
  }
  return count;
}

ExponentFit slow_set_dim(HurstIndex H, double theta, const SlowScanReport &scan,
                         const std::vector<double> &box_ladder) {
  (void)H;
  if (box_ladder.size() < 3)
    throw InvalidArgument("slow_set_dim needs at least 3 box sizes");
  const double min_box = *std::min_element(box_ladder.begin(), box_ladder.end());
  const TimeGrid &g = scan.t_grid;
  for (Eigen::Index i = 1; i < g.size(); ++i)
    if (g[i] - g[i - 1] > min_box * (1 + 1e-9))
      throw InvalidArgument("scan grid is coarser than the smallest box");
  const std::vector<char> member = scan.level_set(theta);
  ExponentFit fit;
  fit.method_tag = "box_counting_ols";
  fit.diagnostics["theta"] = theta;
  if (std::none_of(member.begin(), member.end(), [](char c) { return c != 0; })) {
    fit.status = FitStatus::empty;
    return fit;
  }
  for (double eps : box_ladder) {
    const double c = static_cast<double>(box_count(g, member, eps));
    fit.points.push_back({eps, std::log(1.0 / eps), std::log(c), 0.0, 0.0, 0.0,
                          c, 0.0, 0.0, {0, 0}});
  }
  fit_points(fit, false);
  return fit;
}

} // namespace fbmlab
