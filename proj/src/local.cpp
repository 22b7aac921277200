#include "fbmlab/mvn/local.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace fbmlab {

namespace {

Eigen::Index require_edge(const NoisePartition &partition, double x,
                          const char *name) {
  const Eigen::Index i = partition.xit_edge_index(x);
  if (i < 0) {
    std::ostringstream os;
    os.precision(17);
    os << "noise partition has no cell edge at " << name << " = " << x;
    throw AlignmentError(os.str());
  }
  return i;
}

} // namespace

void build_local_functionals(const MvnCalibration &calib,
                             const NoisePartition &partition, double t,
                             double h, double alpha, LinearFunctional *local,
                             LinearFunctional *error) {
  if (!(alpha > 0 && alpha < 1))
    throw InvalidArgument("alpha must lie in (0,1)");
  if (!(t > 0) || !(h > 0))
    throw InvalidArgument("local increment needs t > 0 and h > 0");
  const double start = t - std::pow(h, alpha);
  if (start < 0) {
    std::ostringstream os;
    os << "h = " << h << " exceeds t^(1/alpha) for t = " << t;
    throw RangeError(os.str());
  }
  if (t + h > partition.T_max()) {
    std::ostringstream os;
    os << "t + h = " << t + h << " beyond noise coverage " << partition.T_max();
    throw RangeError(os.str());
  }
  const double p = calib.hurst.kernel_exponent();
  const bool flat = calib.hurst.is_brownian();
  // The error part alone only needs the window start as an edge.
  const bool need_right = local != nullptr || flat;
  const Eigen::Index i_t = need_right ? require_edge(partition, t, "t") : -1;
  const Eigen::Index i_end =
      need_right ? require_edge(partition, t + h, "t+h") : -1;
  const Eigen::Index i_lo =
      flat ? i_t : require_edge(partition, start, "t-h^alpha");
  const auto &te = partition.xit_edges();
  const double th = t + h;

  if (local) {
    *local = LinearFunctional{};
    local->scale = calib.K_H;
    if (flat) {
      // Kernel is 1 on (t, t+h] and 0 elsewhere.
      local->unit_begin = i_t;
      local->unit_end = i_end;
    } else {
      for (Eigen::Index i = i_lo; i < i_end; ++i) {
        const double w = xit_weight(p, th, te[i], te[i + 1]) -
                         xit_weight(p, t, te[i], te[i + 1]);
        if (w != 0) {
          local->xit_index.push_back(i);
          local->xit_weight.push_back(w);
        }
      }
    }
  }
  if (error) {
    *error = LinearFunctional{};
    error->scale = calib.K_H;
    if (!flat) {
      for (Eigen::Index i = 0; i < i_lo; ++i) {
        const double w = xit_weight(p, th, te[i], te[i + 1]) -
                         xit_weight(p, t, te[i], te[i + 1]);
        if (w != 0) {
          error->xit_index.push_back(i);
          error->xit_weight.push_back(w);
        }
      }
      const auto &se = partition.xi_edges();
      for (Eigen::Index i = 0; i < partition.xi_cells(); ++i) {
        const double w =
            xi_weight(p, th, se[i], se[i + 1]) - xi_weight(p, t, se[i], se[i + 1]);
        if (w != 0) {
          error->xi_index.push_back(i);
          error->xi_weight.push_back(w);
        }
      }
    }
  }
}

LocalDecomp local_increment(const NoiseGrid &noise, const MvnCalibration &calib,
                            double t, double h, double alpha) {
  LinearFunctional d, e;
  build_local_functionals(calib, *noise.partition, t, h, alpha, &d, &e);
  // The increment comes from the path functionals, not from D + E, so the
  // two sides of the decomposition are computed independently.
  const double inc = mvn_B(noise, calib, t + h) - mvn_B(noise, calib, t);
  return {t, h, alpha, inc, d.apply(noise), e.apply(noise)};
}

DecompositionPlan::DecompositionPlan(
    const MvnCalibration &calib, std::shared_ptr<const NoisePartition> partition,
    double alpha, std::vector<LocalQuery> queries, DecompParts parts)
    : partition_(std::move(partition)), alpha_(alpha), parts_(parts),
      queries_(std::move(queries)) {
  const bool want_d = parts_ != DecompParts::error;
  const bool want_e = parts_ != DecompParts::localized;
  local_.resize(want_d ? queries_.size() : 0);
  error_.resize(want_e ? queries_.size() : 0);
  std::map<Eigen::Index, std::size_t> group_of;
  for (std::size_t q = 0; q < queries_.size(); ++q) {
    build_local_functionals(calib, *partition_, queries_[q].t, queries_[q].h,
                            alpha_, want_d ? &local_[q] : nullptr,
                            want_e ? &error_[q] : nullptr);
    if (want_d && local_[q].unit_end > local_[q].unit_begin) {
      const Eigen::Index b = local_[q].unit_begin;
      auto it = group_of.find(b);
      if (it == group_of.end()) {
        it = group_of.emplace(b, runs_.size()).first;
        runs_.push_back(RunGroup{b, {}});
      }
      runs_[it->second].ends.emplace_back(local_[q].unit_end, q);
    }
  }
  for (auto &g : runs_)
    std::sort(g.ends.begin(), g.ends.end());
}

void DecompositionPlan::evaluate_localized(const NoiseGrid &noise,
                                           std::vector<double> &out) const {
  if (parts_ == DecompParts::error)
    throw InvalidArgument("plan does not include the localized part");
  out.assign(queries_.size(), 0.0);
  // Unit-weight runs sharing a start are summed once, left to right, in the
  // same order LinearFunctional::unit_sum uses.
  std::vector<double> unit(queries_.size(), 0.0);
  for (const auto &g : runs_) {
    double s = 0.0;
    Eigen::Index i = g.begin;
    for (const auto &[end, q] : g.ends) {
      for (; i < end; ++i)
        s += noise.xit[i];
      unit[q] = s;
    }
  }
  for (std::size_t q = 0; q < queries_.size(); ++q)
    out[q] = local_[q].scale * local_[q].weighted_sum(noise, unit[q]);
}

void DecompositionPlan::evaluate_error(const NoiseGrid &noise,
                                       std::vector<double> &out) const {
  if (parts_ == DecompParts::localized)
    throw InvalidArgument("plan does not include the error part");
  out.resize(queries_.size());
  for (std::size_t q = 0; q < queries_.size(); ++q)
    out[q] = error_[q].apply(noise);
}

void DecompositionPlan::evaluate(const NoiseGrid &noise,
                                 std::vector<LocalDecomp> &out) const {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> d, e;
  if (parts_ != DecompParts::error)
    evaluate_localized(noise, d);
  if (parts_ != DecompParts::localized)
    evaluate_error(noise, e);
  out.resize(queries_.size());
  for (std::size_t q = 0; q < queries_.size(); ++q) {
    LocalDecomp &r = out[q];
    r.t = queries_[q].t;
    r.h = queries_[q].h;
    r.alpha = alpha_;
    r.localized = d.empty() ? nan : d[q];
    r.error = e.empty() ? nan : e[q];
    r.increment = r.localized + r.error;
  }
}

} // namespace fbmlab
