#include "fbmlab/harness/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>

#include "fbmlab/exponent/crossing.hpp"
#include "fbmlab/fbm/generators.hpp"
#include "fbmlab/harness/csv.hpp"
#include "fbmlab/harness/digest.hpp"
#include "fbmlab/harness/svg.hpp"
#include "fbmlab/mvn/scaling.hpp"
#include "fbmlab/slowset/scan.hpp"
#include "fbmlab/slowset/second_moment.hpp"

#ifndef FBMLAB_VERSION
#define FBMLAB_VERSION "0.0.0"
#endif

namespace fbmlab::harness {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class RunContext {
public:
  RunContext(const ExperimentConfig &cfg, std::ostream &log) : cfg_(cfg), log_(log) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec || !fs::is_directory(cfg.out_dir))
      throw Error("cannot create output directory '" + cfg.out_dir + "'");
    manifest_.command = cfg.command;
    manifest_.version = FBMLAB_VERSION;
    manifest_.timestamp = utc_timestamp();
    manifest_.config = cfg.echo();
    manifest_.seeds = cfg.seeds;
    manifest_.workers = cfg.workers;
  }

  const ExperimentConfig &cfg() const { return cfg_; }
  ParallelOptions parallel() const { return {cfg_.workers, 256}; }
  RunManifest &manifest() { return manifest_; }

  // Per-seed files go to seed_<s>/ when the run has several seeds.
  std::string seed_file(std::uint64_t seed, const std::string &name) const {
    if (cfg_.seeds.size() == 1)
      return name;
    return "seed_" + std::to_string(seed) + "/" + name;
  }

  void write_csv(const std::string &rel, const CsvTable &table) {
    write_text(rel, table.str());
  }

  void write_text(const std::string &rel, const std::string &text) {
    const fs::path p = fs::path(cfg_.out_dir) / rel;
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot write '" + p.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out)
      throw Error("write failed for '" + p.string() + "'");
    manifest_.outputs.push_back({rel, sha256_hex(text), text.size()});
  }

  template <class Fn> void stage(const std::string &name, Fn &&fn) {
    const auto t0 = std::chrono::steady_clock::now();
    log_ << "[" << cfg_.command << "] " << name << " ..." << std::flush;
    fn();
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest_.stages.push_back({name, s});
    log_ << " done (" << std::fixed << std::setprecision(3) << s << " s)\n"
         << std::defaultfloat;
  }

  RunManifest finish() {
    std::sort(manifest_.outputs.begin(), manifest_.outputs.end(),
              [](const OutputRecord &a, const OutputRecord &b) { return a.file < b.file; });
    write_manifest(manifest_, (fs::path(cfg_.out_dir) / "manifest.json").string());
    return manifest_;
  }

private:
  const ExperimentConfig &cfg_;
  std::ostream &log_;
  RunManifest manifest_;
};

// Mean over seeds with a t-based interval; a single seed falls back to its own CI.
Headline combine(const std::string &label, const std::vector<double> &values,
                 const std::vector<Interval> &cis) {
  Headline h;
  h.label = label;
  if (values.empty()) {
    h.status = "empty";
    h.estimate = h.ci_lo = h.ci_hi = kNaN;
    return h;
  }
  if (values.size() == 1) {
    h.estimate = values[0];
    h.ci_lo = cis[0].lo;
    h.ci_hi = cis[0].hi;
    return h;
  }
  Moments m;
  for (double v : values)
    m.add(v);
  const double half = student_t975(static_cast<int>(values.size()) - 1) * m.stderr_mean();
  h.estimate = m.mean();
  h.ci_lo = h.estimate - half;
  h.ci_hi = h.estimate + half;
  return h;
}

// n points, endpoints exact.
TimeGrid fit_ladder(double lo, double hi, long n) {
  return TimeGrid::geometric(lo, hi, static_cast<Eigen::Index>(n - 1));
}

CrossingTarget parse_target(const std::string &s) {
  return s == "localized_D" ? CrossingTarget::localized_D : CrossingTarget::path_B;
}

Monitoring parse_monitoring(const std::string &s) {
  if (s == "bridge")
    return Monitoring::bridge;
  if (s == "discrete")
    return Monitoring::discrete;
  return Monitoring::automatic;
}

void run_gen(RunContext &ctx) {
  const auto &c = ctx.cfg();
  const HurstIndex H(c.real("H"));
  const std::size_t n_paths = static_cast<std::size_t>(c.integer("n_paths"));
  const bool circ = c.word("generator") == "circulant";
  std::unique_ptr<CirculantGenerator> cg;
  std::unique_ptr<CholeskyGenerator> ch;
  ctx.stage("setup", [&] {
    if (circ) {
      cg = std::make_unique<CirculantGenerator>(H, c.integer("n"), c.real("dt"));
    } else {
      const long n = c.integer("n");
      TimeGrid grid = c.word("grid") == "geometric"
                          ? TimeGrid::geometric(c.real("t_lo"), c.real("t_hi"), n - 1)
                          : TimeGrid::uniform(0.0, c.real("t_hi") / static_cast<double>(n - 1), n);
      ch = std::make_unique<CholeskyGenerator>(H, grid);
    }
  });
  CsvTable table({"seed", "path", "t", "value"});
  std::vector<double> per_seed;
  std::vector<Interval> per_ci;
  for (std::uint64_t seed : c.seeds) {
    ctx.stage("sample seed " + std::to_string(seed), [&] {
      const RngStream base = make_rng(seed, 0);
      const Eigen::VectorXd &t =
          circ ? Eigen::VectorXd(Eigen::VectorXd::LinSpaced(cg->n() + 1, 0.0,
                                                            cg->dt() * static_cast<double>(cg->n())))
               : ch->grid().points();
      std::vector<Eigen::VectorXd> paths(n_paths);
      map_blocks<char>(n_paths, ctx.parallel(), [&](const Block &b) {
        Eigen::VectorXd z;
        for (std::size_t i = b.begin; i < b.end; ++i) {
          RngStream r = base.substream(i);
          if (circ) {
            cg->sample_values(r, paths[i]);
          } else {
            paths[i].resize(ch->grid().size());
            ch->sample_values(r, z, paths[i]);
          }
        }
        return char(0);
      });
      // Headline: B(T)^2 / T^(2H), whose mean is 1.
      const double T = t[t.size() - 1];
      Moments m;
      for (std::size_t i = 0; i < n_paths; ++i) {
        const auto &v = paths[i];
        m.add(v[v.size() - 1] * v[v.size() - 1] / std::pow(T, 2 * H.value()));
        for (Eigen::Index k = 0; k < v.size(); ++k)
          table.row()
              .add(static_cast<unsigned long long>(seed))
              .add(static_cast<unsigned long long>(i))
              .add(t[k])
              .add(v[k]);
      }
      per_seed.push_back(m.mean());
      const double half = n_paths > 1 ? 1.959963984540054 * m.stderr_mean() : kNaN;
      per_ci.push_back({m.mean() - half, m.mean() + half});
    });
  }
  ctx.stage("write", [&] { ctx.write_csv("paths.csv", table); });
  ctx.manifest().headline = combine("mean B(T)^2/T^(2H)", per_seed, per_ci);
}

void run_lambda(RunContext &ctx) {
  const auto &c = ctx.cfg();
  CrossingQuery q;
  q.hurst = HurstIndex(c.real("H"));
  q.theta = c.real("theta");
  q.h_lo = c.real("fit_lo");
  q.h_hi = c.real("h_hi");
  q.points_per_decade = c.real("points_per_decade");
  q.target = parse_target(c.word("target"));
  q.alpha = c.real("alpha");
  q.t = c.real("t");
  q.monitoring = parse_monitoring(c.word("monitoring"));
  q.validate();
  CrossingOptions opt;
  opt.parallel = ctx.parallel();
  opt.pilot_paths = static_cast<std::size_t>(c.integer("pilot_paths"));
  opt.min_expected_survivors = c.real("min_expected_survivors");
  opt.ci_inflation = c.real("ci_inflation");
  const TimeGrid lad = fit_ladder(c.real("fit_lo"), c.real("fit_hi"), c.integer("fit_points"));
  const std::vector<double> h(lad.points().data(), lad.points().data() + lad.size());
  const std::size_t n = static_cast<std::size_t>(c.integer("n_paths"));

  std::vector<double> slopes;
  std::vector<Interval> cis;
  std::string status = "ok";
  for (std::uint64_t seed : c.seeds) {
    ExponentFit fit;
    ctx.stage("estimate seed " + std::to_string(seed),
              [&] { fit = estimate_lambda(q, h, n, make_rng(seed, 0), opt); });
    std::vector<std::pair<FitPoint, bool>> pts;
    for (const auto &p : fit.points)
      pts.emplace_back(p, true);
    for (const auto &p : fit.dropped)
      pts.emplace_back(p, false);
    std::sort(pts.begin(), pts.end(),
              [](const auto &a, const auto &b) { return a.first.abscissa > b.first.abscissa; });
    CsvTable t({"h", "minus_log_p", "p_hat", "ci_lo", "ci_hi", "n_paths", "survivors", "used"});
    for (const auto &[p, used] : pts)
      t.row()
          .add(p.abscissa)
          .add(p.value > 0 ? -std::log(p.value) : std::numeric_limits<double>::infinity())
          .add(p.value)
          .add(p.value_ci.lo)
          .add(p.value_ci.hi)
          .add(p.n_paths)
          .add(p.survivors)
          .add(static_cast<long long>(used));
    ctx.write_csv(ctx.seed_file(seed, "lambda_fit.csv"), t);
    if (c.plots)
      ctx.write_text(ctx.seed_file(seed, "lambda_fit.svg"),
                     loglog_svg(fit, "survival exponent, theta = " + format_double(q.theta),
                                "log(h_hi / h)", "-log P"));
    if (fit.status != FitStatus::ok)
      status = to_string(fit.status);
    slopes.push_back(fit.slope);
    cis.push_back(fit.ci95);
  }
  ctx.manifest().headline = combine("lambda_hat", slopes, cis);
  if (status != "ok")
    ctx.manifest().headline.status = status;
}

void run_localize(RunContext &ctx) {
  const auto &c = ctx.cfg();
  const HurstIndex H(c.real("H"));
  const double alpha = c.real("alpha");
  const bool sup = c.word("mode") == "sup";
  const TimeGrid grid = fit_ladder(c.real("h_lo"), c.real("h_hi"), c.integer("h_points"));
  const std::size_t n = static_cast<std::size_t>(c.integer("n_paths"));
  ScalingOptions opt;
  opt.parallel = ctx.parallel();
  opt.growth = c.real("growth");
  SupLatticeOptions lat;
  lat.t_points = static_cast<int>(c.integer("t_points"));
  lat.points_per_decade = c.real("points_per_decade");

  std::vector<double> slopes;
  std::vector<Interval> cis;
  bool degenerate = false;
  for (std::uint64_t seed : c.seeds) {
    ExponentFit fit;
    ctx.stage("estimate seed " + std::to_string(seed), [&] {
      fit = sup ? estimate_sup_error_scaling(H, alpha, {c.real("t_lo"), c.real("t_hi")},
                                             grid, n, make_rng(seed, 0), opt, lat)
                : estimate_error_scaling(H, alpha, c.real("t"), grid, n,
                                         make_rng(seed, 0), opt);
    });
    CsvTable t = sup ? CsvTable({"b", "mean_sup", "stderr"})
                     : CsvTable({"h", "l2_error", "stderr"});
    for (const auto &p : fit.points)
      t.row().add(p.abscissa).add(p.value).add(p.value_se);
    const std::string name = sup ? "sup_error_scaling" : "error_scaling";
    ctx.write_csv(ctx.seed_file(seed, name + ".csv"), t);
    if (c.plots && fit.status == FitStatus::ok)
      ctx.write_text(ctx.seed_file(seed, name + ".svg"),
                     loglog_svg(fit, sup ? "lattice sup of the error" : "L2 norm of the error",
                                sup ? "log b" : "log h",
                                sup ? "log(mean sup / sqrt|log b|)" : "log ||E||_2"));
    if (fit.status == FitStatus::degenerate_zero) {
      degenerate = true;
      continue;
    }
    slopes.push_back(fit.slope);
    cis.push_back(fit.ci95);
  }
  Headline h = combine(sup ? "sup_error_slope" : "l2_error_slope", slopes, cis);
  if (degenerate) {
    h.status = "degenerate_zero";
    h.estimate = h.ci_lo = h.ci_hi = kNaN;
  }
  ctx.manifest().headline = h;
}

void run_moduli(RunContext &ctx) {
  const auto &c = ctx.cfg();
  const HurstIndex H(c.real("H"));
  const double alpha = c.real("alpha");
  const long k = c.integer("pairs");
  const double t0 = c.real("t_lo"), t1 = c.real("t_hi"), h = c.real("h");
  std::vector<ModulusPair> pairs;
  // Time pairs with separations halving from t_hi - t_lo, then scale pairs
  // at t_lo against h_lo along a geometric ladder up to h_hi.
  for (long i = 0; i < k; ++i)
    pairs.push_back({t0, h, t0 + (t1 - t0) * std::ldexp(1.0, -static_cast<int>(i)), h});
  const double hl = c.real("h_lo"), hh = c.real("h_hi");
  for (long i = 1; i <= k; ++i)
    pairs.push_back({t0, hl, t0,
                     hl * std::pow(hh / hl, static_cast<double>(i) / static_cast<double>(k))});
  ScalingOptions opt;
  opt.parallel = ctx.parallel();
  std::vector<double> maxima;
  std::vector<Interval> cis;
  for (std::uint64_t seed : c.seeds) {
    ModulusReport rep;
    ctx.stage("estimate seed " + std::to_string(seed), [&] {
      rep = verify_moduli(H, alpha, pairs,
                          static_cast<std::size_t>(c.integer("n_paths")),
                          make_rng(seed, 0), opt);
    });
    CsvTable t({"t", "h", "t2", "h2", "l2_distance", "bound", "ratio"});
    for (const auto &r : rep.rows)
      t.row()
          .add(r.pair.t)
          .add(r.pair.h)
          .add(r.pair.t2)
          .add(r.pair.h2)
          .add(r.l2_distance)
          .add(r.bound)
          .add(r.ratio);
    ctx.write_csv(ctx.seed_file(seed, "moduli.csv"), t);
    maxima.push_back(rep.max_ratio);
    cis.push_back({kNaN, kNaN});
  }
  ctx.manifest().headline = combine("max_ratio", maxima, cis);
}

std::vector<double> lag_ladder(long lo, long hi, double per_decade, double dt) {
  std::set<long> lags;
  for (int i = 0;; ++i) {
    const long l = std::lround(static_cast<double>(lo) * std::pow(10.0, i / per_decade));
    if (l > hi)
      break;
    lags.insert(l);
  }
  lags.insert(hi);
  std::vector<double> out;
  for (long l : lags)
    out.push_back(static_cast<double>(l) * dt);
  return out;
}

// Distribution-free 95% interval for a median from order statistics.
Interval median_ci(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  const double half = 0.9799819922700135 * std::sqrt(n);
  const auto lo = static_cast<long>(std::floor(n / 2 - half));
  const auto hi = static_cast<long>(std::ceil(n / 2 + half)) - 1;
  const long last = static_cast<long>(v.size()) - 1;
  return {v[static_cast<std::size_t>(std::clamp(lo, 0L, last))],
          v[static_cast<std::size_t>(std::clamp(hi, 0L, last))]};
}

void run_slowdim(RunContext &ctx) {
  const auto &c = ctx.cfg();
  const HurstIndex H(c.real("H"));
  const double dt = c.real("dt");
  const Eigen::Index n = Eigen::Index(1) << c.integer("log2_n");
  const double t_lo = c.real("t_lo"), t_hi = c.real("t_hi");
  const auto thetas = c.real_list("theta");
  const CompactSetSpec K =
      c.word("set") == "cantor"
          ? make_cantor(static_cast<int>(c.integer("cantor_maps")), c.real("cantor_ratio"),
                        static_cast<int>(c.integer("cantor_depth")), t_lo, t_hi)
          : make_interval(t_lo, t_hi);
  const auto lags = lag_ladder(c.integer("lag_min"), c.integer("lag_max"),
                               c.real("lags_per_decade"), dt);
  std::vector<double> boxes;
  for (long b = c.integer("box_min"); b <= c.integer("box_max"); b *= 2)
    boxes.push_back(static_cast<double>(b) * dt);
  const auto i0 = std::lround(t_lo / dt), i1 = std::lround(t_hi / dt);
  const TimeGrid tgrid = TimeGrid::uniform(t_lo, dt, i1 - i0 + 1);

  std::unique_ptr<CirculantGenerator> gen;
  ctx.stage("setup", [&] {
    gen = std::make_unique<CirculantGenerator>(H, n, dt);
    CsvTable pk({"h", "count"});
    for (double b : boxes)
      pk.row().add(b).add(static_cast<unsigned long long>(packing_number(K, b)));
    ctx.write_csv("packing.csv", pk);
  });

  struct SeedResult {
    std::vector<ExponentFit> fits;
    std::vector<std::size_t> level_points;
    double inf_over_K = 0;
    std::string scan_csv;
  };
  const std::size_t ns = c.seeds.size();
  std::vector<SeedResult> results(ns);
  const bool write_scan = c.flag("write_scan");
  ctx.stage("scan " + std::to_string(ns) + " seeds", [&] {
    parallel_for(ns, c.workers, [&](std::size_t s) {
      RngStream r = make_rng(c.seeds[s], 0);
      const FbmPath path = gen->sample(r);
      const SlowScanReport rep = scan_slow(K, H, path, tgrid, lags, thetas);
      SeedResult &out = results[s];
      out.inf_over_K = rep.inf_over_K;
      for (double th : thetas) {
        out.fits.push_back(slow_set_dim(H, th, rep, boxes));
        const auto &ls = rep.theta_level_sets.at(th);
        out.level_points.push_back(
            static_cast<std::size_t>(std::count(ls.begin(), ls.end(), 1)));
      }
      if (write_scan) {
        CsvTable t({"t", "statistic"});
        for (Eigen::Index i = 0; i < tgrid.size(); ++i)
          if (rep.in_K[static_cast<std::size_t>(i)])
            t.row().add(tgrid[i]).add(rep.statistic[i]);
        out.scan_csv = t.str();
      }
    });
  });

  ctx.stage("write", [&] {
    CsvTable dims({"seed", "theta", "status", "dimension", "stderr", "inf_over_K",
                   "level_set_points"});
    for (std::size_t s = 0; s < ns; ++s) {
      const auto &res = results[s];
      if (write_scan)
        ctx.write_text(ctx.seed_file(c.seeds[s], "slow_scan.csv"), res.scan_csv);
      for (std::size_t j = 0; j < thetas.size(); ++j) {
        const auto &f = res.fits[j];
        const bool ok = f.status == FitStatus::ok;
        dims.row()
            .add(static_cast<unsigned long long>(c.seeds[s]))
            .add(thetas[j])
            .add(std::string(to_string(f.status)))
            .add(ok ? f.slope : kNaN)
            .add(ok ? f.std_error : kNaN)
            .add(res.inf_over_K)
            .add(static_cast<unsigned long long>(res.level_points[j]));
        if (c.plots && s == 0 && ok)
          ctx.write_text("slow_dim_theta" + std::to_string(j) + ".svg",
                         loglog_svg(f, "box counts, theta = " + format_double(thetas[j]),
                                    "log(1/eps)", "log N(eps)"));
      }
    }
    ctx.write_csv("slow_dims.csv", dims);
  });

  std::vector<double> d;
  for (const auto &res : results)
    if (res.fits[0].status == FitStatus::ok)
      d.push_back(res.fits[0].slope);
  Headline h;
  h.label = "median_box_dimension";
  if (d.empty()) {
    h.status = "empty";
    h.estimate = h.ci_lo = h.ci_hi = kNaN;
  } else {
    h.estimate = median(d);
    const Interval ci = median_ci(d);
    h.ci_lo = ci.lo;
    h.ci_hi = ci.hi;
  }
  ctx.manifest().headline = h;
}

void run_xstat(RunContext &ctx) {
  const auto &c = ctx.cfg();
  const HurstIndex H(c.real("H"));
  const double t_lo = c.real("t_lo"), t_hi = c.real("t_hi");
  const CompactSetSpec K =
      c.word("set") == "cantor"
          ? make_cantor(static_cast<int>(c.integer("cantor_maps")), c.real("cantor_ratio"),
                        static_cast<int>(c.integer("cantor_depth")), t_lo, t_hi)
          : make_interval(t_lo, t_hi, static_cast<int>(c.integer("interval_atoms")));
  const double h2 = c.real("h2"), h1 = h2 * c.real("h1_ratio");
  SecondMomentOptions opt;
  opt.parallel = ctx.parallel();
  opt.n_calibration = static_cast<std::size_t>(c.integer("n_calibration"));
  opt.points_per_decade = c.real("points_per_decade");
  opt.pool_atoms = c.flag("pool_atoms");
  CsvTable t({"seed", "x_value"});
  std::vector<double> means;
  std::vector<Interval> cis;
  for (std::uint64_t seed : c.seeds) {
    SecondMomentReport rep;
    ctx.stage("estimate seed " + std::to_string(seed), [&] {
      rep = second_moment_stat(K, H, c.real("alpha"), c.real("theta"), h1, h2,
                               static_cast<std::size_t>(c.integer("n_paths")),
                               make_rng(seed, 0), opt);
    });
    for (double x : rep.X_samples)
      t.row().add(static_cast<unsigned long long>(seed)).add(x);
    means.push_back(rep.mean);
    cis.push_back(rep.mean_ci);
  }
  ctx.stage("write", [&] { ctx.write_csv("xstat.csv", t); });
  ctx.manifest().headline = combine("mean_X", means, cis);
}

} // namespace

RunManifest run(const ExperimentConfig &cfg, std::ostream &log) {
  if (cfg.command == "report") {
    RunContext ctx(cfg, log);
    const auto rows = report(cfg.word_list("manifests"), "", log);
    ctx.write_csv("report.csv", report_csv(rows));
    ctx.manifest().headline = {"runs", "ok", static_cast<double>(rows.size()), kNaN, kNaN};
    return ctx.finish();
  }
  RunContext ctx(cfg, log);
  if (cfg.command == "gen")
    run_gen(ctx);
  else if (cfg.command == "lambda")
    run_lambda(ctx);
  else if (cfg.command == "localize")
    run_localize(ctx);
  else if (cfg.command == "moduli")
    run_moduli(ctx);
  else if (cfg.command == "slowdim")
    run_slowdim(ctx);
  else if (cfg.command == "xstat")
    run_xstat(ctx);
  else
    throw Error("unknown command '" + cfg.command + "'");
  return ctx.finish();
}

} // namespace fbmlab::harness
