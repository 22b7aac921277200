#pragma once

#include <map>
#include <vector>

#include "fbmlab/core.hpp"
#include "fbmlab/fit.hpp"
#include "fbmlab/mvn/local.hpp"
#include "fbmlab/slowset/compact.hpp"

namespace fbmlab {

struct SlowScanReport {
  TimeGrid t_grid;
  std::vector<double> h_ladder;
  // M(t) = max over the ladder of |increment| / h^H.
  Eigen::VectorXd statistic;
  std::vector<char> in_K;
  double inf_over_K = 0;
  std::map<double, std::vector<char>> theta_level_sets;

  // Indicator of {t in K : M(t) <= theta} on the scan grid.
  std::vector<char> level_set(double theta) const;
};

// Increments B(t + h) - B(t) read off a uniform path; every t and t + h must
// be a grid point.
SlowScanReport scan_slow(const CompactSetSpec &K, HurstIndex H,
                         const FbmPath &path, const TimeGrid &t_grid,
                         const std::vector<double> &h_ladder,
                         const std::vector<double> &thetas = {});

// Localized increments D_alpha(t, h) from one noise realization; the plan
// must hold the queries (t_i, h_j) in t-major order.
SlowScanReport scan_slow(const CompactSetSpec &K, HurstIndex H,
                         const DecompositionPlan &plan, const NoiseGrid &noise,
                         const TimeGrid &t_grid,
                         const std::vector<double> &h_ladder,
                         const std::vector<double> &thetas = {});

// Builds the partition and plan for (t_grid x h_ladder), samples one noise
// realization from rng, and scans it.
SlowScanReport scan_slow(const CompactSetSpec &K, const MvnCalibration &calib,
                         double alpha, const TimeGrid &t_grid,
                         const std::vector<double> &h_ladder,
                         const std::vector<double> &thetas, RngStream &rng);

// Box-counting fit over the theta-level set of a scan. Status empty when no
// grid point qualifies.
ExponentFit slow_set_dim(HurstIndex H, double theta, const SlowScanReport &scan,
                         const std::vector<double> &box_ladder);

// Number of boxes of size eps (anchored at the grid start) that meet the set.
std::size_t box_count(const TimeGrid &grid, const std::vector<char> &member,
                      double eps);

} // namespace fbmlab
