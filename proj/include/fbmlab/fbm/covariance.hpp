#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>

#include "fbmlab/core.hpp"

namespace fbmlab {

// E[B(s) B(t)] = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2.
template <class Scalar> Scalar fbm_cov(Scalar s, Scalar t, Scalar H) {
  using std::abs;
  using std::pow;
  if (s < Scalar(0) || t < Scalar(0))
    throw InvalidArgument("fbm_cov needs nonnegative times");
  const Scalar two_h = Scalar(2) * H;
  return Scalar(0.5) * (pow(t, two_h) + pow(s, two_h) - pow(abs(t - s), two_h));
}

inline double fbm_cov(double s, double t, HurstIndex H) {
  return fbm_cov<double>(s, t, H.value());
}

// Autocovariance of unit-step fractional Gaussian noise at lag k.
template <class Scalar> Scalar fgn_autocov(long k, Scalar H) {
  using std::pow;
  const Scalar two_h = Scalar(2) * H;
  const Scalar a = Scalar(std::labs(k));
  return Scalar(0.5) * (pow(a + Scalar(1), two_h) - Scalar(2) * pow(a, two_h) +
                        pow(std::abs(a - Scalar(1)), two_h));
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
fbm_cov_matrix(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &times, Scalar H) {
  const Eigen::Index n = times.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> c(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j; i < n; ++i)
      c(i, j) = c(j, i) = fbm_cov<Scalar>(times[i], times[j], H);
  return c;
}

} // namespace fbmlab
