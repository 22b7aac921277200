#include "fbmlab/exponent/crossing.hpp"

#include "fbmlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fbmlab {

namespace {
constexpr double kZ95 = 1.959963984540054;
}

const char *to_string(CrossingTarget target) {
  return target == CrossingTarget::path_B ? "path_B" : "localized_D";
}

void CrossingQuery::validate() const {
  if (!(theta > 0))
    throw InvalidArgument("theta must be positive");
  if (!(h_lo > 0) || !(h_lo <= h_hi) || !(h_hi <= 1))
    throw InvalidArgument("crossing query needs 0 < h_lo <= h_hi <= 1");
  if (!(points_per_decade >= 16))
    throw InvalidArgument("monitoring ladder needs >= 16 points per decade");
  if (monitoring == Monitoring::bridge && !hurst.is_brownian())
    throw InvalidArgument("bridge monitoring is exact only at H = 1/2");
  if (target == CrossingTarget::localized_D) {
    if (!(alpha > 0 && alpha < 1))
      throw InvalidArgument("alpha must lie in (0,1)");
    if (!(t > 0) || h_hi > std::pow(t, 1.0 / alpha))
      throw InvalidArgument("localized target needs h_hi <= t^(1/alpha)");
  }
}

bool CrossingQuery::uses_bridge() const {
  switch (monitoring) {
  case Monitoring::bridge:
    return true;
  case Monitoring::discrete:
    return false;
  case Monitoring::automatic:
    return hurst.is_brownian();
  }
  return false;
}

CrossingEngine::CrossingEngine(const CrossingQuery &q, std::vector<double> fit_h)
    : query_(q), fit_h_(std::move(fit_h)) {
  query_.validate();
  if (fit_h_.empty())
    fit_h_.push_back(query_.h_lo);
  std::sort(fit_h_.begin(), fit_h_.end());
  fit_h_.erase(std::unique(fit_h_.begin(), fit_h_.end()), fit_h_.end());
  for (double h : fit_h_)
    if (!(h > 0) || h > query_.h_hi)
      throw InvalidArgument("fit levels must lie in (0, h_hi]");
  Eigen::VectorXd anchors(static_cast<Eigen::Index>(fit_h_.size()) + 1);
  for (std::size_t j = 0; j < fit_h_.size(); ++j)
    anchors[static_cast<Eigen::Index>(j)] = fit_h_[j];
  anchors[anchors.size() - 1] = query_.h_hi;
  const Eigen::VectorXd lad = anchored_ladder(anchors, query_.points_per_decade);
  ladder_.assign(lad.data(), lad.data() + lad.size());
  for (double h : fit_h_) {
    auto it = std::lower_bound(ladder_.begin(), ladder_.end(), h);
    fit_index_.push_back(static_cast<std::size_t>(it - ladder_.begin()));
  }
  const double H = query_.hurst.value();
  for (double s : ladder_)
    bound_unit_.push_back(std::pow(s, H));
  bridge_ = query_.uses_bridge();

  if (query_.target == CrossingTarget::path_B) {
    chol_ = std::make_unique<CholeskyGenerator>(query_.hurst, TimeGrid(lad));
  } else {
    const MvnCalibration calib = calibrate_KH(query_.hurst, 1e-8);
    std::vector<std::pair<double, double>> ql;
    std::vector<LocalQuery> queries;
    for (double h : ladder_) {
      ql.emplace_back(query_.t, h);
      queries.push_back({query_.t, h});
    }
    const ResolutionPolicy pol =
        policy_for_queries(query_.hurst, query_.alpha, ql);
    partition_ = std::make_shared<NoisePartition>(
        calib, query_.t + query_.h_hi, pol);
    plan_ = std::make_unique<DecompositionPlan>(
        calib, partition_, query_.alpha, queries, DecompParts::localized);
  }
}

void CrossingEngine::sample(RngStream &rng, Workspace &ws) const {
  const auto m = static_cast<Eigen::Index>(ladder_.size());
  ws.values.resize(m);
  if (chol_) {
    chol_->sample_values(rng, ws.z, ws.values);
  } else {
    const NoiseGrid noise = sample_noise(partition_, rng);
    plan_->evaluate_localized(noise, ws.local);
    for (Eigen::Index k = 0; k < m; ++k)
      ws.values[k] = ws.local[static_cast<std::size_t>(k)];
  }
}

void CrossingEngine::survival(const Eigen::VectorXd &values, double theta,
                              std::vector<double> &weights) const {
  const std::size_t m = ladder_.size();
  weights.assign(fit_h_.size(), 0.0);
  // Suffix products from the top of the ladder down.
  double running = 1.0;
  std::size_t j = fit_h_.size();
  for (std::size_t kk = m; kk-- > 0;) {
    const double v = values[static_cast<Eigen::Index>(kk)];
    const double u = theta * bound_unit_[kk];
    if (std::abs(v) > u) {
      running = 0.0;
      break;
    }
    if (bridge_ && kk + 1 < m) {
      const double y = values[static_cast<Eigen::Index>(kk + 1)];
      const double u1 = theta * bound_unit_[kk + 1];
      const double dt = ladder_[kk + 1] - ladder_[kk];
      const double q = 1.0 - std::exp(-2.0 * (u - v) * (u1 - y) / dt) -
                       std::exp(-2.0 * (u + v) * (u1 + y) / dt);
      running *= std::max(0.0, q);
    }
    while (j > 0 && fit_index_[j - 1] == kk)
      weights[--j] = running;
    if (running == 0.0)
      break;
  }
}

SurvivalEstimate crossing_survival(const CrossingQuery &q, std::size_t n_paths,
                                   const RngStream &rng,
                                   const CrossingOptions &opt) {
  if (n_paths < 1)
    throw InvalidArgument("need at least one path");
  const CrossingEngine engine(q);
  struct Acc {
    double sum = 0;
  };
  const RngStream base = role_stream(rng, StreamRole::main);
  const auto blocks =
      map_blocks<Acc>(n_paths, opt.parallel, [&](const Block &b) {
        Acc acc;
        CrossingEngine::Workspace ws;
        std::vector<double> w;
        for (std::size_t i = b.begin; i < b.end; ++i) {
          RngStream r = base.substream(i);
          engine.sample(r, ws);
          engine.survival(ws.values, q.theta, w);
          acc.sum += w[0];
        }
        return acc;
      });
  double sum = 0;
  for (const auto &b : blocks)
    sum += b.sum;
  SurvivalEstimate est;
  est.n_paths = static_cast<double>(n_paths);
  est.survivors = sum;
  est.p_hat = sum / est.n_paths;
  est.ci = wilson_interval(est.p_hat, est.n_paths);
  if (sum == 0) {
    est.zero_survivors = true;
    est.ci.lo = 0;
  }
  return est;
}

ExponentFit estimate_lambda(const CrossingQuery &q,
                            const std::vector<double> &h_ladder,
                            std::size_t n_paths, const RngStream &rng,
                            const CrossingOptions &opt) {
  if (h_ladder.size() < 3)
    throw RangeError("estimate_lambda needs at least 3 ladder points");
  if (n_paths < 1)
    throw InvalidArgument("need at least one path");
  const CrossingEngine engine(q, h_ladder);
  const auto &levels = engine.fit_levels();
  const std::size_t m = levels.size();

  struct Acc {
    std::vector<double> sum;
    std::vector<double> cross; // m x m, row-major
    std::vector<double> alive;
  };
  auto run = [&](const RngStream &base, std::size_t n) {
    const auto blocks = map_blocks<Acc>(n, opt.parallel, [&](const Block &b) {
      Acc acc{std::vector<double>(m, 0.0), std::vector<double>(m * m, 0.0),
              std::vector<double>(m, 0.0)};
      CrossingEngine::Workspace ws;
      std::vector<double> w;
      for (std::size_t i = b.begin; i < b.end; ++i) {
        RngStream r = base.substream(i);
        engine.sample(r, ws);
        engine.survival(ws.values, q.theta, w);
        for (std::size_t j = 0; j < m; ++j) {
          if (w[j] == 0)
            continue;
          acc.sum[j] += w[j];
          acc.alive[j] += 1;
          for (std::size_t k = 0; k < m; ++k)
            acc.cross[j * m + k] += w[j] * w[k];
        }
      }
      return acc;
    });
    Acc tot{std::vector<double>(m, 0.0), std::vector<double>(m * m, 0.0),
            std::vector<double>(m, 0.0)};
    for (const auto &b : blocks) {
      for (std::size_t j = 0; j < m; ++j) {
        tot.sum[j] += b.sum[j];
        tot.alive[j] += b.alive[j];
      }
      for (std::size_t k = 0; k < m * m; ++k)
        tot.cross[k] += b.cross[k];
    }
    return tot;
  };

  const std::size_t n_pilot = std::max<std::size_t>(1, opt.pilot_paths);
  const Acc pilot = run(role_stream(rng, StreamRole::pilot), n_pilot);
  const Acc main = run(role_stream(rng, StreamRole::main), n_paths);

  ExponentFit fit;
  fit.method_tag = std::string("mc_survival_") + to_string(q.target) +
                   (engine.query().uses_bridge() ? "_bridge" : "_discrete");
  const double n = static_cast<double>(n_paths);
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < m; ++j) {
    const double h = levels[j];
    const double p = main.sum[j] / n;
    const Interval ci = wilson_interval(p, n);
    FitPoint pt{h, std::log(q.h_hi / h), p > 0 ? -std::log(p) : 0.0,
                0.0, n, main.sum[j], p, std::sqrt(p * (1 - p) / n), 0, ci};
    const double expected = pilot.sum[j] / static_cast<double>(n_pilot) * n;
    if (expected < opt.min_expected_survivors || p == 0) {
      fit.dropped.push_back(pt);
      continue;
    }
    pt.sigma = (std::log(ci.hi) - std::log(ci.lo)) / (2 * kZ95);
    fit.points.push_back(pt);
    kept.push_back(j);
  }
  if (fit.points.size() < 3) {
    std::ostringstream os;
    os << "only " << fit.points.size()
       << " ladder points have enough expected survivors (need 3)";
    throw RangeError(os.str());
  }
  fit_points(fit, true, opt.ci_inflation);

  // Sandwich variance of the WLS slope under the shared-ensemble covariance.
  const std::size_t u = kept.size();
  double sw = 0, swx = 0;
  for (const auto &pt : fit.points) {
    sw += 1 / (pt.sigma * pt.sigma);
    swx += pt.x / (pt.sigma * pt.sigma);
  }
  const double xbar = swx / sw;
  double sxx = 0;
  for (const auto &pt : fit.points)
    sxx += (pt.x - xbar) * (pt.x - xbar) / (pt.sigma * pt.sigma);
  std::vector<double> a(u);
  for (std::size_t i = 0; i < u; ++i) {
    const auto &pt = fit.points[i];
    a[i] = (pt.x - xbar) / (pt.sigma * pt.sigma) / sxx;
  }
  auto log_cov = [&](std::size_t i, std::size_t k) {
    const std::size_t j1 = kept[i], j2 = kept[k];
    const double p1 = main.sum[j1] / n, p2 = main.sum[j2] / n;
    const double c = (main.cross[j1 * m + j2] / n - p1 * p2) / n;
    return c / (p1 * p2);
  };
  double var = 0, corr = 0;
  for (std::size_t i = 0; i < u; ++i)
    for (std::size_t k = 0; k < u; ++k)
      var += a[i] * a[k] * log_cov(i, k);
  for (std::size_t i = 0; i + 1 < u; ++i)
    corr += log_cov(i, i + 1) / std::sqrt(log_cov(i, i) * log_cov(i + 1, i + 1));
  fit.diagnostics["sandwich_stderr"] = std::sqrt(std::max(0.0, var));
  fit.diagnostics["adjacent_correlation"] = u > 1 ? corr / double(u - 1) : 0.0;
  fit.diagnostics["ladder_points"] = static_cast<double>(engine.ladder().size());
  fit.diagnostics["pilot_paths"] = static_cast<double>(n_pilot);
  fit.diagnostics["bridge"] = engine.query().uses_bridge() ? 1.0 : 0.0;
  return fit;
}

RoyenReport royen_mc_check(HurstIndex H, double theta,
                           const std::vector<double> &ladder_a,
                           const std::vector<double> &ladder_b,
                           std::size_t n_paths, const RngStream &rng,
                           const RoyenOptions &opt) {
  if (ladder_a.empty() || ladder_b.empty())
    throw InvalidArgument("royen_mc_check needs two nonempty ladders");
  if (!(theta > 0))
    throw InvalidArgument("theta must be positive");
  if (n_paths < 2)
    throw InvalidArgument("need at least two paths");
  std::vector<double> all(ladder_a);
  all.insert(all.end(), ladder_b.begin(), ladder_b.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  if (!(all.front() > 0))
    throw InvalidArgument("ladder points must be positive");
  Eigen::VectorXd grid = Eigen::Map<Eigen::VectorXd>(
      all.data(), static_cast<Eigen::Index>(all.size()));
  const CholeskyGenerator gen(H, TimeGrid(grid));
  auto indices = [&](const std::vector<double> &l) {
    std::vector<Eigen::Index> idx;
    for (double s : l)
      idx.push_back(std::lower_bound(all.begin(), all.end(), s) - all.begin());
    return idx;
  };
  const auto ia = indices(ladder_a), ib = indices(ladder_b);
  auto inside = [&](const Eigen::VectorXd &v,
                    const std::vector<Eigen::Index> &idx) {
    for (auto k : idx)
      if (std::abs(v[k]) > theta * std::pow(grid[k], H.value()))
        return false;
    return true;
  };
  struct Acc {
    double a = 0, b = 0, ab = 0;
  };
  auto run = [&](const RngStream &base, std::size_t n) {
    const auto blocks = map_blocks<Acc>(n, opt.parallel, [&](const Block &blk) {
      Acc acc;
      Eigen::VectorXd z, v1(grid.size()), v2(grid.size());
      for (std::size_t i = blk.begin; i < blk.end; ++i) {
        RngStream r = base.substream(i);
        gen.sample_values(r, z, v1);
        bool in_a = inside(v1, ia), in_b;
        if (opt.independent_paths) {
          gen.sample_values(r, z, v2);
          in_b = inside(v2, ib);
        } else {
          in_b = inside(v1, ib);
        }
        acc.a += in_a;
        acc.b += in_b;
        acc.ab += in_a && in_b;
      }
      return acc;
    });
    Acc tot;
    for (const auto &b : blocks) {
      tot.a += b.a;
      tot.b += b.b;
      tot.ab += b.ab;
    }
    return tot;
  };

  RoyenReport rep;
  const std::size_t n_pilot = std::max<std::size_t>(1, opt.pilot_paths);
  const Acc pilot = run(role_stream(rng, StreamRole::pilot), n_pilot);
  rep.pilot_a = pilot.a / static_cast<double>(n_pilot);
  rep.pilot_b = pilot.b / static_cast<double>(n_pilot);
  if (rep.pilot_a < 0.05 || rep.pilot_b < 0.05) {
    std::ostringstream os;
    os << "pilot probabilities " << rep.pilot_a << ", " << rep.pilot_b
       << " below 0.05";
    throw InvalidArgument(os.str());
  }
  const Acc acc = run(role_stream(rng, StreamRole::main), n_paths);
  const double n = static_cast<double>(n_paths);
  const double pa = acc.a / n, pb = acc.b / n, pab = acc.ab / n;
  rep.p_a = pa;
  rep.p_b = pb;
  rep.p_ab = pab;
  rep.difference = pab - pa * pb;
  // Influence function of pab - pa pb: 1_AB - pb 1_A - pa 1_B.
  const double mean_if = pab - 2 * pa * pb;
  const double second = pab + pb * pb * pa + pa * pa * pb - 2 * pb * pab -
                        2 * pa * pab + 2 * pa * pb * pab;
  rep.std_error = std::sqrt(std::max(0.0, second - mean_if * mean_if) / n);
  rep.ci = {rep.difference - kZ95 * rep.std_error,
            rep.difference + kZ95 * rep.std_error};
  rep.pass = rep.ci.lo >= -2 * rep.std_error;
  return rep;
}

} // namespace fbmlab
