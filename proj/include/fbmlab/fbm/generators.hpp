#pragma once

#include <Eigen/Dense>

#include "fbmlab/core.hpp"
#include "fbmlab/rng.hpp"

namespace fbmlab {

struct CholeskyOptions {
  Eigen::Index max_points = 4096;
  // A pivot fails when L_ii^2 <= pivot_tolerance * Sigma_ii.
  double pivot_tolerance = 1e-12;
};

// Exact sampler on an arbitrary grid. The factor is built once and shared
// read-only; sampling only touches caller-owned buffers.
class CholeskyGenerator {
public:
  CholeskyGenerator(HurstIndex H, TimeGrid grid, CholeskyOptions opt = {});

  HurstIndex hurst() const { return hurst_; }
  const TimeGrid &grid() const { return grid_; }
  // Lower factor of the covariance over the strictly positive grid times.
  const Eigen::MatrixXd &factor() const { return factor_; }

  // Writes grid.size() values; z is scratch of any size.
  void sample_values(RngStream &rng, Eigen::VectorXd &z,
                     Eigen::Ref<Eigen::VectorXd> out) const;
  FbmPath sample(RngStream &rng) const;

private:
  HurstIndex hurst_;
  TimeGrid grid_;
  Eigen::Index offset_;
  Eigen::MatrixXd factor_;
};

FbmPath generate_cholesky(HurstIndex H, const TimeGrid &grid, RngStream &rng,
                          const CholeskyOptions &opt = {});

// Eigenvalues of the 2n circulant embedding of unit-step fGn.
Eigen::VectorXd circulant_eigenvalues(HurstIndex H, Eigen::Index n);

// Davies-Harte sampler on {0, dt, ..., n dt}.
class CirculantGenerator {
public:
  static constexpr double kEigenTolerance = -1e-12;

  CirculantGenerator(HurstIndex H, Eigen::Index n, double dt);

  HurstIndex hurst() const { return hurst_; }
  Eigen::Index n() const { return n_; }
  double dt() const { return dt_; }
  const Eigen::VectorXd &eigenvalues() const { return eigenvalues_; }

  // Writes n + 1 path values starting with B(0) = 0.
  void sample_values(RngStream &rng, Eigen::VectorXd &out) const;
  FbmPath sample(RngStream &rng) const;

private:
  HurstIndex hurst_;
  Eigen::Index n_;
  double dt_;
  Eigen::VectorXd eigenvalues_;
  Eigen::VectorXd scale_;
};

FbmPath generate_circulant(HurstIndex H, Eigen::Index n, double dt,
                           RngStream &rng);

} // namespace fbmlab
