#include "fbmlab/mvn/scaling.hpp"

#include "fbmlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace fbmlab {

double beta_exponent(double H, double alpha) {
  return H + (1 - H) * (1 - alpha);
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0 && alpha < 1))
    throw InvalidArgument("alpha must lie in (0,1)");
}

ExponentFit degenerate_fit(const char *tag) {
  ExponentFit fit;
  fit.status = FitStatus::degenerate_zero;
  fit.method_tag = tag;
  fit.diagnostics["reason"] = 0; // E_alpha vanishes identically at H = 1/2
  return fit;
}

struct MomentBlock {
  std::vector<double> s2, s4;
};

// Subdivides every log-interval of an ascending ladder into 2^level pieces.
std::vector<double> refine_ladder(const Eigen::VectorXd &base, int level) {
  const int k = 1 << level;
  std::vector<double> out{base[0]};
  for (Eigen::Index i = 1; i < base.size(); ++i) {
    const double lr = std::log(base[i] / base[i - 1]);
    for (int j = 1; j < k; ++j)
      out.push_back(base[i - 1] *
                    std::exp(lr * static_cast<double>(j) / static_cast<double>(k)));
    out.push_back(base[i]);
  }
  return out;
}

std::vector<double> lattice_times(double t0, double t1, int t_points,
                                  int level) {
  const long n = static_cast<long>(t_points - 1) * (1L << level) + 1;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k)
    out[k] = n == 1 ? t0
                    : t0 + (t1 - t0) * (static_cast<double>(k) /
                                        static_cast<double>(n - 1));
  out.back() = n == 1 ? t0 : t1;
  return out;
}

} // namespace

ExponentFit estimate_error_scaling(HurstIndex H, double alpha, double t,
                                   const TimeGrid &h_grid, std::size_t n_paths,
                                   const RngStream &rng,
                                   const ScalingOptions &opt) {
  check_alpha(alpha);
  if (H.is_brownian())
    return degenerate_fit("mc_l2_error");
  if (h_grid.size() < 6 || !h_grid.is_geometric(1e-6))
    throw InvalidArgument("h grid must be geometric with at least 6 points");
  if (!(t > 0) || h_grid.back() > std::pow(t, 1.0 / alpha))
    throw RangeError("h grid must satisfy h <= t^(1/alpha)");
  if (n_paths < 2)
    throw InvalidArgument("need at least two paths");

  const MvnCalibration calib = calibrate_KH(H, opt.calibration_tolerance);
  const std::size_t m = static_cast<std::size_t>(h_grid.size());
  std::vector<LocalQuery> queries;
  ResolutionPolicy pol;
  pol.growth = opt.growth;
  pol.foci.push_back(t);
  for (std::size_t j = 0; j < m; ++j) {
    const double h = h_grid[static_cast<Eigen::Index>(j)];
    queries.push_back({t, h});
    pol.required.push_back(t - std::pow(h, alpha));
  }
  pol.min_cell = opt.growth * std::pow(h_grid.front(), alpha) / 4;
  auto partition =
      std::make_shared<NoisePartition>(calib, t + h_grid.back(), pol);
  const DecompositionPlan plan(calib, partition, alpha, queries,
                               DecompParts::error);

  const auto blocks = map_blocks<MomentBlock>(
      n_paths, opt.parallel, [&](const Block &b) {
        MomentBlock acc{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
        std::vector<double> e;
        for (std::size_t i = b.begin; i < b.end; ++i) {
          RngStream r = rng.substream(i);
          const NoiseGrid noise = sample_noise(partition, r);
          plan.evaluate_error(noise, e);
          for (std::size_t j = 0; j < m; ++j) {
            const double e2 = e[j] * e[j];
            acc.s2[j] += e2;
            acc.s4[j] += e2 * e2;
          }
        }
        return acc;
      });
  std::vector<double> s2(m, 0.0), s4(m, 0.0);
  for (const auto &b : blocks)
    for (std::size_t j = 0; j < m; ++j) {
      s2[j] += b.s2[j];
      s4[j] += b.s4[j];
    }

  ExponentFit fit;
  fit.method_tag = "mc_l2_error";
  const double n = static_cast<double>(n_paths);
  std::vector<double> ax, ay, as;
  for (std::size_t j = 0; j < m; ++j) {
    const double h = queries[j].h;
    const double m2 = s2[j] / n;
    const double var4 = std::max(0.0, (s4[j] / n - m2 * m2) * n / (n - 1));
    const double l2 = std::sqrt(m2);
    const double se = std::sqrt(var4 / n) / (2 * l2);
    const double analytic = std::sqrt(plan.error(j).variance(*partition));
    FitPoint pt{h, std::log(h), std::log(l2), se / l2, n, n, l2, se,
                std::log(analytic)};
    fit.points.push_back(pt);
    ax.push_back(std::log(h));
    ay.push_back(std::log(analytic));
    as.push_back(1.0);
  }
  fit_points(fit, true);
  fit.diagnostics["beta"] = beta_exponent(H.value(), alpha);
  fit.diagnostics["analytic_slope"] = weighted_line_fit(ax, ay, as, false).slope;
  fit.diagnostics["xit_cells"] = static_cast<double>(partition->xit_cells());
  fit.diagnostics["xi_cells"] = static_cast<double>(partition->xi_cells());
  return fit;
}

ExponentFit estimate_sup_error_scaling(HurstIndex H, double alpha,
                                       std::pair<double, double> t_window,
                                       const TimeGrid &b_grid,
                                       std::size_t n_paths,
                                       const RngStream &rng,
                                       const ScalingOptions &opt,
                                       const SupLatticeOptions &lattice) {
  check_alpha(alpha);
  if (H.is_brownian())
    return degenerate_fit("mc_sup_error");
  const auto [t0, t1] = t_window;
  if (!(t0 > 0) || !(t1 >= t0))
    throw InvalidArgument("t window must satisfy 0 < t0 <= t1");
  if (b_grid.size() < 3 || !b_grid.is_geometric(1e-6))
    throw InvalidArgument("b grid must be geometric with at least 3 points");
  const double b_cap = std::min(std::pow(t0, 1.0 / alpha), std::exp(-1.0));
  if (b_grid.back() > b_cap)
    throw RangeError("b grid must lie in (0, t0^(1/alpha) ^ 1/e]");
  if (lattice.t_points < 1 || lattice.lattice_level < 0 ||
      lattice.partition_level < 0)
    throw InvalidArgument("invalid sup lattice options");
  if (n_paths < 2)
    throw InvalidArgument("need at least two paths");

  const MvnCalibration calib = calibrate_KH(H, opt.calibration_tolerance);
  Eigen::VectorXd anchors(b_grid.size() + 1);
  anchors << b_grid.front() / 4, b_grid.points();
  const Eigen::VectorXd base = anchored_ladder(anchors, lattice.points_per_decade);

  const int plevel = std::max(lattice.lattice_level, lattice.partition_level);
  ResolutionPolicy pol;
  pol.growth = opt.growth;
  {
    const auto ts = lattice_times(t0, t1, lattice.t_points, plevel);
    const auto hs = refine_ladder(base, plevel);
    pol.foci = ts;
    for (double t : ts)
      for (double h : hs)
        pol.required.push_back(t - std::pow(h, alpha));
    pol.min_cell = opt.growth * std::pow(hs.front(), alpha) / 4;
  }
  auto partition =
      std::make_shared<NoisePartition>(calib, t1 + b_grid.back(), pol);

  const auto ts = lattice_times(t0, t1, lattice.t_points, lattice.lattice_level);
  const auto hs = refine_ladder(base, lattice.lattice_level);
  std::vector<LocalQuery> queries;
  for (double h : hs)
    for (double t : ts)
      queries.push_back({t, h});
  const DecompositionPlan plan(calib, partition, alpha, queries,
                               DecompParts::error);
  const std::size_t nt = ts.size(), nh = hs.size(), nb = b_grid.size();
  std::vector<double> inv_hH(nh);
  for (std::size_t k = 0; k < nh; ++k)
    inv_hH[k] = std::pow(hs[k], -H.value());
  // Number of ladder points <= each b.
  std::vector<std::size_t> upto(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    const double b = b_grid[static_cast<Eigen::Index>(j)];
    upto[j] = static_cast<std::size_t>(
        std::upper_bound(hs.begin(), hs.end(), b * (1 + 1e-12)) - hs.begin());
  }

  const auto blocks = map_blocks<std::vector<Moments>>(
      n_paths, opt.parallel, [&](const Block &blk) {
        std::vector<Moments> acc(nb);
        std::vector<double> e;
        for (std::size_t i = blk.begin; i < blk.end; ++i) {
          RngStream r = rng.substream(i);
          const NoiseGrid noise = sample_noise(partition, r);
          plan.evaluate_error(noise, e);
          double running = 0;
          std::size_t k = 0;
          for (std::size_t j = 0; j < nb; ++j) {
            for (; k < upto[j]; ++k)
              for (std::size_t a = 0; a < nt; ++a)
                running = std::max(running, std::abs(e[k * nt + a]) * inv_hH[k]);
            acc[j].add(running);
          }
        }
        return acc;
      });
  std::vector<Moments> tot(nb);
  for (const auto &b : blocks)
    for (std::size_t j = 0; j < nb; ++j)
      tot[j].merge(b[j]);

  ExponentFit fit;
  fit.method_tag = "mc_sup_error";
  const double n = static_cast<double>(n_paths);
  for (std::size_t j = 0; j < nb; ++j) {
    const double b = b_grid[static_cast<Eigen::Index>(j)];
    const double norm = std::sqrt(std::abs(std::log(b)));
    const double mean_sup = tot[j].mean();
    const double se = tot[j].stderr_mean();
    fit.points.push_back({b, std::log(b), std::log(mean_sup / norm),
                          se / mean_sup, n, n, mean_sup, se, 0});
  }
  fit_points(fit, true);
  fit.diagnostics["beta_minus_H"] = beta_exponent(H.value(), alpha) - H.value();
  fit.diagnostics["lattice_t_points"] = static_cast<double>(nt);
  fit.diagnostics["lattice_h_points"] = static_cast<double>(nh);
  fit.diagnostics["xit_cells"] = static_cast<double>(partition->xit_cells());
  return fit;
}

double modulus_bound(double H, double alpha, const ModulusPair &pr) {
  const double dt = std::abs(pr.t - pr.t2);
  const double dh = std::abs(pr.h - pr.h2);
  const double h = std::max(pr.h, pr.h2);
  double bt = 0;
  if (dt > 0)
    bt = H <= 0.5 ? std::pow(dt, H)
                  : std::pow(dt + std::pow(h, alpha), H - 0.5) * std::sqrt(dt);
  const double bh = dh > 0 ? std::pow(dh, alpha * std::min(H, 0.5)) : 0.0;
  return bt + bh;
}

ModulusReport verify_moduli(HurstIndex H, double alpha,
                            const std::vector<ModulusPair> &pairs,
                            std::size_t n_paths, const RngStream &rng,
                            const ScalingOptions &opt) {
  check_alpha(alpha);
  if (pairs.empty())
    throw InvalidArgument("verify_moduli needs at least one pair");
  if (n_paths < 1)
    throw InvalidArgument("need at least one path");
  const MvnCalibration calib = calibrate_KH(H, opt.calibration_tolerance);
  std::map<std::pair<double, double>, std::size_t> index;
  std::vector<LocalQuery> queries;
  auto add = [&](double t, double h) {
    auto key = std::make_pair(t, h);
    auto it = index.find(key);
    if (it != index.end())
      return it->second;
    index.emplace(key, queries.size());
    queries.push_back({t, h});
    return queries.size() - 1;
  };
  std::vector<std::pair<std::size_t, std::size_t>> qp;
  double t_max = 0;
  for (const auto &p : pairs) {
    qp.emplace_back(add(p.t, p.h), add(p.t2, p.h2));
    t_max = std::max({t_max, p.t + p.h, p.t2 + p.h2});
  }
  std::vector<std::pair<double, double>> qlist;
  for (const auto &q : queries)
    qlist.emplace_back(q.t, q.h);
  ResolutionPolicy pol = policy_for_queries(H, alpha, qlist);
  pol.growth = opt.growth;
  auto partition = std::make_shared<NoisePartition>(calib, t_max, pol);
  const DecompositionPlan plan(calib, partition, alpha, queries,
                               DecompParts::localized);
  const std::size_t np = pairs.size();
  const auto blocks = map_blocks<std::vector<double>>(
      n_paths, opt.parallel, [&](const Block &blk) {
        std::vector<double> acc(np, 0.0), d;
        for (std::size_t i = blk.begin; i < blk.end; ++i) {
          RngStream r = rng.substream(i);
          const NoiseGrid noise = sample_noise(partition, r);
          plan.evaluate_localized(noise, d);
          for (std::size_t k = 0; k < np; ++k) {
            const double diff = d[qp[k].first] - d[qp[k].second];
            acc[k] += diff * diff;
          }
        }
        return acc;
      });
  std::vector<double> tot(np, 0.0);
  for (const auto &b : blocks)
    for (std::size_t k = 0; k < np; ++k)
      tot[k] += b[k];

  ModulusReport rep;
  rep.metric_used = H.value() <= 0.5
                        ? "|t-t'|^H + |h-h'|^(alpha*H)"
                        : "(|t-t'|+h^alpha)^(H-1/2)|t-t'|^(1/2) + |h-h'|^(alpha/2)";
  for (std::size_t k = 0; k < np; ++k) {
    const double l2 = std::sqrt(tot[k] / static_cast<double>(n_paths));
    const double bound = modulus_bound(H.value(), alpha, pairs[k]);
    double ratio = 0;
    if (bound > 0)
      ratio = l2 / bound;
    else if (l2 > 0)
      ratio = std::numeric_limits<double>::infinity();
    rep.rows.push_back({pairs[k], l2, bound, ratio});
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  return rep;
}

} // namespace fbmlab
