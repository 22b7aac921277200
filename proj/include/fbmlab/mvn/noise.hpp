#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

#include "fbmlab/mvn/calibration.hpp"
#include "fbmlab/rng.hpp"

namespace fbmlab {

// Cell-width rule for the two noises. Near each focus the xi~ cells shrink
// geometrically down to min_cell; every required point becomes a cell edge.
struct ResolutionPolicy {
  double growth = 0.05;
  double min_cell = 1e-8;
  double xi_growth = 0.05;
  double xi_min_cell = 1e-8;
  std::vector<double> foci;
  std::vector<double> required;
};

// Foci {t, t+h} and edges {t - h^alpha, t, t + h} for every query, with
// min_cell = min(1e-8, h_min / 64). At H = 1/2 the kernels are flat, so
// no grading or window-start edge is added.
ResolutionPolicy policy_for_queries(
    HurstIndex H, double alpha,
    const std::vector<std::pair<double, double>> &queries);

class NoisePartition {
public:
  NoisePartition(const MvnCalibration &calib, double T_max,
                 const ResolutionPolicy &policy);

  double T_max() const { return t_edges_.back(); }
  double S_max() const { return s_edges_.empty() ? 0.0 : s_edges_.back(); }
  const std::vector<double> &xit_edges() const { return t_edges_; }
  const std::vector<double> &xi_edges() const { return s_edges_; }
  Eigen::Index xit_cells() const {
    return static_cast<Eigen::Index>(t_edges_.size()) - 1;
  }
  Eigen::Index xi_cells() const {
    return s_edges_.empty() ? 0 : static_cast<Eigen::Index>(s_edges_.size()) - 1;
  }
  // Index of x in xit_edges when it is an edge exactly, else -1.
  Eigen::Index xit_edge_index(double x) const;
  // First xi~ cell whose left edge is >= x.
  Eigen::Index xit_first_cell_at_or_after(double x) const;

private:
  std::vector<double> t_edges_;
  std::vector<double> s_edges_;
};

// One realization of both noises: independent N(0, cell length) increments.
struct NoiseGrid {
  std::shared_ptr<const NoisePartition> partition;
  Eigen::VectorXd xi;
  Eigen::VectorXd xit;
  std::uint64_t seed = 0;
};

NoiseGrid sample_noise(std::shared_ptr<const NoisePartition> partition,
                       RngStream &rng);
NoiseGrid sample_noise(const MvnCalibration &calib, double T_max,
                       const ResolutionPolicy &policy, RngStream &rng);

// Cell-average kernel weights: exact kernel integral over the cell divided
// by its length.
// xi~ kernel (tau - s)^p on the part of [a, b] left of tau.
double xit_weight(double p, double tau, double a, double b);
// xi kernel (tau + s)^p - s^p on [a, b].
double xi_weight(double p, double tau, double a, double b);

// A linear functional of the noise: scale * (sum_i w_i xi~_i + sum_j v_j xi_j).
// Cells in [unit_begin, unit_end) carry weight exactly 1 and are summed
// first, left to right.
struct LinearFunctional {
  double scale = 1.0;
  Eigen::Index unit_begin = 0;
  Eigen::Index unit_end = 0;
  std::vector<Eigen::Index> xit_index;
  std::vector<double> xit_weight;
  std::vector<Eigen::Index> xi_index;
  std::vector<double> xi_weight;

  double unit_sum(const NoiseGrid &noise) const;
  double weighted_sum(const NoiseGrid &noise, double unit_part) const;
  double apply(const NoiseGrid &noise) const {
    return scale * weighted_sum(noise, unit_sum(noise));
  }
  // Exact variance over the noise law.
  double variance(const NoisePartition &partition) const;
};

// Functional of B(t) over the whole partition.
LinearFunctional path_functional(const MvnCalibration &calib,
                                 const NoisePartition &partition, double t);

double mvn_B(const NoiseGrid &noise, const MvnCalibration &calib, double t);
// Analytic Var of the discretized B(t), summing exact per-cell variances.
double mvn_variance(const MvnCalibration &calib, const NoisePartition &partition,
                    double t);

} // namespace fbmlab
