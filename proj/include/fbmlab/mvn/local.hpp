#pragma once

#include <memory>
#include <vector>

#include "fbmlab/mvn/noise.hpp"

namespace fbmlab {

// (B(t+h) - B(t), D_alpha(t,h), E_alpha(t,h)) from one noise realization.
struct LocalDecomp {
  double t;
  double h;
  double alpha;
  double increment;
  double localized;
  double error;
};

struct LocalQuery {
  double t;
  double h;
};

enum class DecompParts { both, localized, error };

// Precomputed localized/error functionals for a fixed list of (t, h) on a
// fixed partition. Immutable after construction; evaluate() may be called
// concurrently on different noise realizations.
class DecompositionPlan {
public:
  DecompositionPlan(const MvnCalibration &calib,
                    std::shared_ptr<const NoisePartition> partition,
                    double alpha, std::vector<LocalQuery> queries,
                    DecompParts parts = DecompParts::both);

  std::size_t size() const { return queries_.size(); }
  const LocalQuery &query(std::size_t i) const { return queries_[i]; }
  double alpha() const { return alpha_; }
  const NoisePartition &partition() const { return *partition_; }
  const std::shared_ptr<const NoisePartition> &partition_ptr() const {
    return partition_;
  }
  const LinearFunctional &localized(std::size_t i) const { return local_[i]; }
  const LinearFunctional &error(std::size_t i) const { return error_[i]; }

  // Fills out[i] for every query. Parts not planned are left as NaN.
  void evaluate(const NoiseGrid &noise, std::vector<LocalDecomp> &out) const;
  void evaluate_localized(const NoiseGrid &noise,
                          std::vector<double> &out) const;
  void evaluate_error(const NoiseGrid &noise, std::vector<double> &out) const;

private:
  struct RunGroup {
    Eigen::Index begin;
    std::vector<std::pair<Eigen::Index, std::size_t>> ends; // (end, query)
  };

  std::shared_ptr<const NoisePartition> partition_;
  double alpha_;
  DecompParts parts_;
  std::vector<LocalQuery> queries_;
  std::vector<LinearFunctional> local_;
  std::vector<LinearFunctional> error_;
  std::vector<RunGroup> runs_;
};

// Builds the two functionals for one (t, h). Throws RangeError when
// h > t^{1/alpha} or t + h > T_max, AlignmentError when a window edge is not
// a cell edge.
void build_local_functionals(const MvnCalibration &calib,
                             const NoisePartition &partition, double t,
                             double h, double alpha, LinearFunctional *local,
                             LinearFunctional *error);

// increment is B(t+h) - B(t) from the path functionals; localized + error
// reproduces it up to rounding.
LocalDecomp local_increment(const NoiseGrid &noise, const MvnCalibration &calib,
                            double t, double h, double alpha);

} // namespace fbmlab
