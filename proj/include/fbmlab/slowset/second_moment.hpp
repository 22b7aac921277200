#pragma once

#include <vector>

#include "fbmlab/core.hpp"
#include "fbmlab/parallel.hpp"
#include "fbmlab/rng.hpp"
#include "fbmlab/slowset/compact.hpp"

namespace fbmlab {

struct SecondMomentReport {
  double h1 = 0;
  double h2 = 0;
  double theta = 0;
  std::vector<double> X_samples;
  double mean = 0;
  double second_moment = 0;
  double mean_stderr = 0;
  Interval mean_ci{0, 0};
  std::vector<Atom> atoms;
  std::vector<double> p_hat_table;
  std::size_t n_calibration = 0;
};

struct SecondMomentOptions {
  ParallelOptions parallel;
  std::size_t n_calibration = 5000;
  double points_per_decade = 32;
  double min_probability = 1e-3;
  // Use one pooled probability for all atoms (valid when the event law does
  // not depend on t, e.g. H = 1/2).
  bool pool_atoms = false;
};

// X = sum_i mu_i 1{A(h1,h2,t_i)} / P(A(h1,h2,t_i)) over the atoms of K's
// natural measure, where A is {|D_alpha(t,h)| <= theta h^H for ladder h in
// [h1, h2]}. Probabilities come from a calibration ensemble independent of
// the n_paths evaluation ensemble.
SecondMomentReport second_moment_stat(const CompactSetSpec &K, HurstIndex H,
                                      double alpha, double theta, double h1,
                                      double h2, std::size_t n_paths,
                                      const RngStream &rng,
                                      const SecondMomentOptions &opt = {});

} // namespace fbmlab
