#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fbmlab/fit.hpp"
#include "fbmlab/mvn/local.hpp"
#include "fbmlab/parallel.hpp"

namespace fbmlab {

// Decay exponent of the localization error, H + (1 - H)(1 - alpha).
double beta_exponent(double H, double alpha);

struct ScalingOptions {
  ParallelOptions parallel;
  double growth = 0.05;
  double calibration_tolerance = 1e-8;
};

// Monte Carlo L2 norm of E_alpha(t, h) over the h grid, fitted in log-log.
// At H = 1/2 returns status degenerate_zero without sampling.
ExponentFit estimate_error_scaling(HurstIndex H, double alpha, double t,
                                   const TimeGrid &h_grid, std::size_t n_paths,
                                   const RngStream &rng,
                                   const ScalingOptions &opt = {});

struct SupLatticeOptions {
  int t_points = 32;
  double points_per_decade = 8;
  // Each level halves the t spacing and the log-h spacing; partition_level
  // >= lattice_level lets two lattices share one noise realization.
  int lattice_level = 0;
  int partition_level = 0;
};

// Monte Carlo mean of sup over a (t, h <= b) lattice of |E_alpha|/h^H,
// divided by sqrt|log b| and fitted against log b.
ExponentFit estimate_sup_error_scaling(HurstIndex H, double alpha,
                                       std::pair<double, double> t_window,
                                       const TimeGrid &b_grid,
                                       std::size_t n_paths,
                                       const RngStream &rng,
                                       const ScalingOptions &opt = {},
                                       const SupLatticeOptions &lattice = {});

struct ModulusPair {
  double t, h, t2, h2;
};

struct ModulusRow {
  ModulusPair pair;
  double l2_distance;
  double bound;
  double ratio;
};

struct ModulusReport {
  std::vector<ModulusRow> rows;
  std::string metric_used;
  double max_ratio = 0;
};

// Bound for ||D(t,h) - D(t',h')||_2 up to constants: the t-modulus at the
// common scale plus the h-modulus |h - h'|^{alpha (H ^ 1/2)}.
double modulus_bound(double H, double alpha, const ModulusPair &pair);

ModulusReport verify_moduli(HurstIndex H, double alpha,
                            const std::vector<ModulusPair> &pairs,
                            std::size_t n_paths, const RngStream &rng,
                            const ScalingOptions &opt = {});

} // namespace fbmlab
