#include "fbmlab/slowset/second_moment.hpp"

#include "fbmlab/mvn/local.hpp"
#include "fbmlab/stats.hpp"

#include <cmath>
#include <sstream>

namespace fbmlab {

SecondMomentReport second_moment_stat(const CompactSetSpec &K, HurstIndex H,
                                      double alpha, double theta, double h1,
                                      double h2, std::size_t n_paths,
                                      const RngStream &rng,
                                      const SecondMomentOptions &opt) {
  if (!(theta > 0))
    throw InvalidArgument("theta must be positive");
  if (!(h1 > 0) || !(h2 > h1))
    throw InvalidArgument("second moment statistic needs 0 < h1 < h2");
  if (n_paths < 2 || opt.n_calibration < 1)
    throw InvalidArgument("need at least two evaluation paths");
  if (K.natural_measure.empty())
    throw InvalidArgument("compact set carries no measure");

  const MvnCalibration calib = calibrate_KH(H, 1e-8);
  const std::vector<Atom> &atoms = K.natural_measure;
  const Eigen::VectorXd lad = geometric_ladder(h1, h2, opt.points_per_decade);
  const std::size_t na = atoms.size();
  const std::size_t nh = static_cast<std::size_t>(lad.size());
  std::vector<double> bound(nh);
  for (std::size_t j = 0; j < nh; ++j)
    bound[j] = theta * std::pow(lad[static_cast<Eigen::Index>(j)], H.value());

  std::vector<std::pair<double, double>> ql;
  std::vector<LocalQuery> queries;
  double t_max = 0;
  for (const auto &at : atoms)
    for (std::size_t j = 0; j < nh; ++j) {
      const double h = lad[static_cast<Eigen::Index>(j)];
      ql.emplace_back(at.point, h);
      queries.push_back({at.point, h});
      t_max = std::max(t_max, at.point + h);
    }
  const ResolutionPolicy pol = policy_for_queries(H, alpha, ql);
  auto partition = std::make_shared<NoisePartition>(calib, t_max, pol);
  const DecompositionPlan plan(calib, partition, alpha, queries,
                               DecompParts::localized);

  auto events = [&](RngStream &r, std::vector<double> &d,
                    std::vector<char> &in) {
    const NoiseGrid noise = sample_noise(partition, r);
    plan.evaluate_localized(noise, d);
    in.assign(na, 1);
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t j = 0; j < nh; ++j)
        if (std::abs(d[i * nh + j]) > bound[j]) {
          in[i] = 0;
          break;
        }
  };

  // Calibration ensemble: per-atom survivor counts.
  const RngStream cal = role_stream(rng, StreamRole::calibration);
  const auto cal_blocks = map_blocks<std::vector<double>>(
      opt.n_calibration, opt.parallel, [&](const Block &b) {
        std::vector<double> cnt(na, 0.0), d;
        std::vector<char> in;
        for (std::size_t i = b.begin; i < b.end; ++i) {
          RngStream r = cal.substream(i);
          events(r, d, in);
          for (std::size_t a = 0; a < na; ++a)
            cnt[a] += in[a];
        }
        return cnt;
      });
  std::vector<double> cnt(na, 0.0);
  for (const auto &b : cal_blocks)
    for (std::size_t a = 0; a < na; ++a)
      cnt[a] += b[a];

  SecondMomentReport rep;
  rep.h1 = h1;
  rep.h2 = h2;
  rep.theta = theta;
  rep.atoms = atoms;
  rep.n_calibration = opt.n_calibration;
  const double ncal = static_cast<double>(opt.n_calibration);
  double pooled = 0;
  for (std::size_t a = 0; a < na; ++a)
    pooled += cnt[a];
  pooled /= ncal * static_cast<double>(na);
  for (std::size_t a = 0; a < na; ++a) {
    const double p = opt.pool_atoms ? pooled : cnt[a] / ncal;
    if (p == 0) {
      std::ostringstream os;
      os << "atom t = " << atoms[a].point << " has zero calibration survivors";
      throw RangeError(os.str());
    }
    if (p < opt.min_probability) {
      std::ostringstream os;
      os << "atom t = " << atoms[a].point << " has probability " << p
         << " below " << opt.min_probability;
      throw RangeError(os.str());
    }
    rep.p_hat_table.push_back(p);
  }
  std::vector<double> coef(na);
  for (std::size_t a = 0; a < na; ++a)
    coef[a] = atoms[a].weight / rep.p_hat_table[a];

  // Evaluation ensemble.
  const RngStream ev = role_stream(rng, StreamRole::evaluation);
  rep.X_samples.assign(n_paths, 0.0);
  parallel_for(make_blocks(n_paths, opt.parallel.block_size).size(),
               opt.parallel.workers, [&](std::size_t bi) {
                 const std::size_t begin = bi * opt.parallel.block_size;
                 const std::size_t end =
                     std::min(n_paths, begin + opt.parallel.block_size);
                 std::vector<double> d;
                 std::vector<char> in;
                 for (std::size_t i = begin; i < end; ++i) {
                   RngStream r = ev.substream(i);
                   events(r, d, in);
                   double x = 0;
                   for (std::size_t a = 0; a < na; ++a)
                     if (in[a])
                       x += coef[a];
                   rep.X_samples[i] = x;
                 }
               });
  Moments mom;
  for (double x : rep.X_samples)
    mom.add(x);
  rep.mean = mom.mean();
  rep.second_moment = mom.second();
  rep.mean_stderr = mom.stderr_mean();
  const double half = 1.959963984540054 * rep.mean_stderr;
  rep.mean_ci = {rep.mean - half, rep.mean + half};
  return rep;
}

} // namespace fbmlab
