#include "fbmlab/fbm/generators.hpp"

#include "fbmlab/fbm/covariance.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

namespace fbmlab {

namespace {

// Unblocked pass used only to name the failing pivot.
void locate_bad_pivot(const Eigen::MatrixXd &sigma, double tol, Eigen::Index offset) {
  const Eigen::Index n = sigma.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = sigma(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > tol * sigma(j, j))) {
      std::ostringstream os;
      os << "Cholesky factorization failed: non-positive pivot " << d
         << " at index " << j + offset << " (duplicate times or extreme H)";
      throw FactorizationError(os.str(), j + offset, d);
    }
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i)
      l(i, j) = (sigma(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
  }
}

} // namespace

CholeskyGenerator::CholeskyGenerator(HurstIndex H, TimeGrid grid,
                                     CholeskyOptions opt)
    : hurst_(H), grid_(std::move(grid)), offset_(grid_.front() == 0 ? 1 : 0) {
  if (grid_.size() > opt.max_points) {
    std::ostringstream os;
    os << "Cholesky grid has " << grid_.size() << " points, cap is "
       << opt.max_points;
    throw InvalidArgument(os.str());
  }
  const Eigen::Index n = grid_.size() - offset_;
  if (n == 0)
    return;
  const Eigen::VectorXd times = grid_.points().tail(n);
  const Eigen::MatrixXd sigma = fbm_cov_matrix<double>(times, H.value());
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    locate_bad_pivot(sigma, opt.pivot_tolerance, offset_);
    throw FactorizationError("Cholesky factorization failed", -1, 0);
  }
  factor_ = llt.matrixL();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double piv = factor_(j, j) * factor_(j, j);
    if (!(piv > opt.pivot_tolerance * sigma(j, j))) {
      std::ostringstream os;
      os << "Cholesky factorization failed: pivot " << piv << " at index "
         << j + offset_ << " below tolerance (duplicate times or extreme H)";
      throw FactorizationError(os.str(), j + offset_, piv);
    }
  }
}

void CholeskyGenerator::sample_values(RngStream &rng, Eigen::VectorXd &z,
                                      Eigen::Ref<Eigen::VectorXd> out) const {
  const Eigen::Index n = factor_.rows();
  z.resize(n);
  rng.fill_normal(z);
  if (offset_)
    out[0] = 0.0;
  out.tail(n).noalias() = factor_.triangularView<Eigen::Lower>() * z;
}

FbmPath CholeskyGenerator::sample(RngStream &rng) const {
  Eigen::VectorXd z, values(grid_.size());
  sample_values(rng, z, values);
  return FbmPath{grid_, std::move(values), hurst_, GeneratorTag::cholesky,
                 rng.seed()};
}

FbmPath generate_cholesky(HurstIndex H, const TimeGrid &grid, RngStream &rng,
                          const CholeskyOptions &opt) {
  return CholeskyGenerator(H, grid, opt).sample(rng);
}

Eigen::VectorXd circulant_eigenvalues(HurstIndex H, Eigen::Index n) {
  if (n < 1 || (n & (n - 1)) != 0)
    throw InvalidArgument("circulant generator needs n a power of two");
  const Eigen::Index m = 2 * n;
  std::vector<double> row(static_cast<std::size_t>(m));
  for (Eigen::Index k = 0; k <= n; ++k)
    row[k] = fgn_autocov<double>(static_cast<long>(k), H.value());
  for (Eigen::Index k = 1; k < n; ++k)
    row[m - k] = row[k];
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, row);
  Eigen::VectorXd lam(m);
  for (Eigen::Index k = 0; k < m; ++k)
    lam[k] = spec[k].real();
  return lam;
}

CirculantGenerator::CirculantGenerator(HurstIndex H, Eigen::Index n, double dt)
    : hurst_(H), n_(n), dt_(dt) {
  if (!(dt > 0))
    throw InvalidArgument("circulant generator needs dt > 0");
  eigenvalues_ = circulant_eigenvalues(H, n);
  const double min_eig = eigenvalues_.minCoeff();
  if (min_eig < kEigenTolerance) {
    std::ostringstream os;
    os << "circulant embedding has negative eigenvalue " << min_eig;
    throw SpectrumError(os.str(), min_eig);
  }
  const double m = static_cast<double>(2 * n);
  scale_ = (eigenvalues_.array().max(0.0) / m).sqrt();
}

void CirculantGenerator::sample_values(RngStream &rng,
                                       Eigen::VectorXd &out) const {
  const Eigen::Index m = 2 * n_;
  std::vector<std::complex<double>> w(static_cast<std::size_t>(m)), y;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double re = rng.normal();
    const double im = rng.normal();
    w[k] = std::complex<double>(scale_[k] * re, scale_[k] * im);
  }
  Eigen::FFT<double> fft;
  fft.fwd(y, w);
  const double s = std::pow(dt_, hurst_.value());
  out.resize(n_ + 1);
  out[0] = 0.0;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < n_; ++k) {
    acc += y[k].real();
    out[k + 1] = s * acc;
  }
}

FbmPath CirculantGenerator::sample(RngStream &rng) const {
  Eigen::VectorXd values;
  sample_values(rng, values);
  return FbmPath{TimeGrid::uniform(0.0, dt_, n_ + 1), std::move(values),
                 hurst_, GeneratorTag::circulant, rng.seed()};
}

FbmPath generate_circulant(HurstIndex H, Eigen::Index n, double dt,
                           RngStream &rng) {
  return CirculantGenerator(H, n, dt).sample(rng);
}

} // namespace fbmlab
