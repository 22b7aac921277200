#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fbmlab {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class RangeError : public Error {
public:
  using Error::Error;
};

// A query point that does not sit on a cell boundary of the noise partition.
class AlignmentError : public Error {
public:
  using Error::Error;
};

class FactorizationError : public Error {
public:
  FactorizationError(const std::string &what, Eigen::Index index, double pivot)
      : Error(what), index_(index), pivot_(pivot) {}
  Eigen::Index index() const { return index_; }
  double pivot() const { return pivot_; }

private:
  Eigen::Index index_;
  double pivot_;
};

class SpectrumError : public Error {
public:
  SpectrumError(const std::string &what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const { return min_eigenvalue_; }

private:
  double min_eigenvalue_;
};

class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string &what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

private:
  double achieved_;
};

class HurstIndex {
public:
  static constexpr double kMin = 0.05;
  static constexpr double kMax = 0.95;

  explicit HurstIndex(double value);

  double value() const { return value_; }
  bool is_brownian() const { return value_ == 0.5; }
  // Exponent of the moving-average kernels, H - 1/2.
  double kernel_exponent() const { return value_ - 0.5; }

private:
  double value_;
};

class TimeGrid {
public:
  explicit TimeGrid(Eigen::VectorXd points);

  // {t0, t0 + dt, ..., t0 + (n - 1) dt}
  static TimeGrid uniform(double t0, double dt, Eigen::Index n);
  // n intervals: n + 1 points lo * (hi/lo)^(i/n), ascending, endpoints exact.
  static TimeGrid geometric(double lo, double hi, Eigen::Index n);

  const Eigen::VectorXd &points() const { return points_; }
  Eigen::Index size() const { return points_.size(); }
  double operator[](Eigen::Index i) const { return points_[i]; }
  double front() const { return points_[0]; }
  double back() const { return points_[points_.size() - 1]; }
  bool is_geometric(double rel_tol = 1e-9) const;

private:
  Eigen::VectorXd points_;
};

enum class GeneratorTag { cholesky, circulant, mvn };

const char *to_string(GeneratorTag tag);

struct FbmPath {
  TimeGrid grid;
  Eigen::VectorXd values;
  HurstIndex hurst;
  GeneratorTag generator;
  std::uint64_t seed;
};

// Geometric ladder between lo and hi (ascending) with at least
// points_per_decade points per factor of ten; every anchor is hit exactly.
Eigen::VectorXd geometric_ladder(double lo, double hi, double points_per_decade);
Eigen::VectorXd anchored_ladder(const Eigen::VectorXd &anchors,
                                double points_per_decade);

} // namespace fbmlab
