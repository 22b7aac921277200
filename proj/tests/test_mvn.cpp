#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>

#include "fbmlab/mvn/calibration.hpp"
#include "fbmlab/mvn/local.hpp"
#include "fbmlab/mvn/noise.hpp"
#include "fbmlab/mvn/scaling.hpp"
#include "fbmlab/quadrature.hpp"

using namespace fbmlab;

namespace {

// Closed form of the Mandelbrot-van Ness normalization.
double closed_form_KH(double H) {
  return std::sqrt(std::tgamma(2 * H + 1) * std::sin(M_PI * H)) / std::tgamma(H + 0.5);
}

std::shared_ptr<NoisePartition> partition_around(const MvnCalibration &c, double t,
                                                 double T_max) {
  ResolutionPolicy pol;
  pol.foci = {t};
  pol.required = {t};
  return std::make_shared<NoisePartition>(c, T_max, pol);
}

} // namespace

TEST_CASE("K_H matches the closed form") {
  for (double H : {0.1, 0.25, 0.3, 0.45, 0.55, 0.7, 0.85}) {
    const MvnCalibration c = calibrate_KH(HurstIndex(H), 1e-8);
    CHECK(c.K_H == doctest::Approx(closed_form_KH(H)).epsilon(1e-8));
    CHECK(c.tail_variance <= 1e-5);
  }
}

TEST_CASE("Brownian calibration is exact") {
  const MvnCalibration c = calibrate_KH(HurstIndex(0.5), 1e-8);
  CHECK(c.K_H == 1.0);
  CHECK(c.S_max == 0.0);
  CHECK(c.s_max_for(5.0) == 0.0);
}

TEST_CASE("calibration rejects tolerances below 1e-8") {
  CHECK_THROWS_AS(calibrate_KH(HurstIndex(0.3), 1e-12), InvalidArgument);
}

TEST_CASE("S_max grows with the horizon like T^(1/(1-H))") {
  const MvnCalibration c = calibrate_KH(HurstIndex(0.3), 1e-8);
  CHECK(c.s_max_for(0.5) == c.S_max);
  CHECK(c.s_max_for(2.0) == doctest::Approx(c.S_max * std::pow(2.0, 1 / 0.7)));
}

TEST_CASE("pow_diff is accurate where the naive difference cancels") {
  const double u = 1e6, d = 1e-6, q = 0.8;
  // (u+d)^q - u^q = q u^(q-1) d (1 + (q-1) d / (2u) + ...)
  const double series = q * std::pow(u, q - 1) * d * (1 + (q - 1) * d / (2 * u));
  CHECK(pow_diff(u, d, q) == doctest::Approx(series).epsilon(1e-12));
  CHECK(pow_diff(2.0, 1.0, 2.0) == doctest::Approx(5.0));
}

TEST_CASE("xi tail integral agrees with direct quadrature") {
  for (double H : {0.3, 0.7}) {
    const double p = H - 0.5, t = 1.0, S = 64.0;
    const auto f = [&](double s) {
      const double v = std::pow(t + s, p) - std::pow(s, p);
      return v * v;
    };
    // Integrate to a large cutoff and add the leading power tail beyond it.
    const double cut = 1e6;
    const auto r = integrate(f, S, cut, 1e-16, 1e-12, 64, 20000);
    const double tail = p * p * t * t * std::pow(cut, 2 * p - 1) / (1 - 2 * p);
    CHECK(xi_tail_integral(p, t, S) == doctest::Approx(r.value + tail).epsilon(1e-6));
  }
}

TEST_CASE("cell variance of B(t) equals t^{2H}") {
  for (double H : {0.3, 0.5, 0.7}) {
    const MvnCalibration c = calibrate_KH(HurstIndex(H), 1e-8);
    for (double t : {0.5, 1.0}) {
      const auto part = partition_around(c, t, 1.0);
      CHECK(std::abs(mvn_variance(c, *part, t) / std::pow(t, 2 * H) - 1) < 1e-4);
    }
  }
}

TEST_CASE("partition contains required edges and respects the growth law") {
  const MvnCalibration c = calibrate_KH(HurstIndex(0.3), 1e-8);
  ResolutionPolicy pol;
  pol.foci = {0.5};
  pol.required = {0.25, 0.5, 0.75};
  const NoisePartition part(c, 1.0, pol);
  for (double r : pol.required)
    CHECK(part.xit_edge_index(r) >= 0);
  const auto &e = part.xit_edges();
  CHECK(e.front() == 0.0);
  CHECK(e.back() == 1.0);
  for (std::size_t i = 1; i < e.size(); ++i)
    CHECK(e[i] > e[i - 1]);
  CHECK_THROWS_AS(NoisePartition(c, 1.0, [] {
                    ResolutionPolicy p;
                    p.required = {1.5};
                    return p;
                  }()),
                  RangeError);
}

TEST_CASE("increment equals localized plus error at machine precision") {
  for (double H : {0.3, 0.5, 0.7}) {
    const MvnCalibration c = calibrate_KH(HurstIndex(H), 1e-8);
    RngStream u = make_rng(17, 0);
    for (int k = 0; k < 50; ++k) {
      const double t = 0.2 + 1.8 * u.uniform(), alpha = 0.3 + 0.6 * u.uniform();
      const double h = std::min(std::pow(t, 1 / alpha), 0.5) * std::pow(10.0, -3 * u.uniform());
      RngStream r = u.substream(static_cast<std::uint64_t>(k));
      const NoiseGrid noise =
          sample_noise(c, t + h, policy_for_queries(HurstIndex(H), alpha, {{t, h}}), r);
      const LocalDecomp d = local_increment(noise, c, t, h, alpha);
      const double scale =
          1 + std::abs(mvn_B(noise, c, t)) + std::abs(mvn_B(noise, c, t + h));
      CHECK(std::abs(d.increment - (d.localized + d.error)) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("Brownian error term vanishes identically") {
  const MvnCalibration c = calibrate_KH(HurstIndex(0.5), 1e-8);
  RngStream r = make_rng(3, 0);
  const NoiseGrid noise =
      sample_noise(c, 2.0, policy_for_queries(HurstIndex(0.5), 0.7, {{1.0, 0.1}}), r);
  const LocalDecomp d = local_increment(noise, c, 1.0, 0.1, 0.7);
  CHECK(d.error == 0.0);
  CHECK(d.localized == d.increment);
}

TEST_CASE("localized part is bitwise unchanged when outside noise is resampled") {
  for (double H : {0.3, 0.7}) {
    const MvnCalibration c = calibrate_KH(HurstIndex(H), 1e-8);
    const double t = 1.0, h = 0.05, alpha = 0.7;
    auto part = std::make_shared<NoisePartition>(
        c, 1.2, policy_for_queries(HurstIndex(H), alpha, {{t, h}}));
    const DecompositionPlan plan(c, part, alpha, {{t, h}}, DecompParts::both);
    RngStream r = make_rng(8, 0);
    NoiseGrid noise = sample_noise(part, r);
    std::vector<double> d0, d1;
    plan.evaluate_localized(noise, d0);
    const double lo = t - std::pow(h, alpha), hi = t + h;
    const auto &e = part->xit_edges();
    RngStream rs = role_stream(r, StreamRole::resample);
    for (Eigen::Index i = 0; i < noise.xit.size(); ++i)
      if (e[i + 1] <= lo || e[i] >= hi)
        noise.xit[i] = rs.normal();
    for (Eigen::Index i = 0; i < noise.xi.size(); ++i)
      noise.xi[i] = rs.normal();
    plan.evaluate_localized(noise, d1);
    CHECK(d0[0] == d1[0]);
  }
}

TEST_CASE("decomposition is linear in the noise") {
  const MvnCalibration c = calibrate_KH(HurstIndex(0.3), 1e-8);
  auto part = std::make_shared<NoisePartition>(
      c, 1.5, policy_for_queries(HurstIndex(0.3), 0.5, {{1.0, 0.1}}));
  LinearFunctional d, e;
  build_local_functionals(c, *part, 1.0, 0.1, 0.5, &d, &e);
  RngStream r = make_rng(2, 0);
  const NoiseGrid a = sample_noise(part, r), b = sample_noise(part, r);
  NoiseGrid s = a;
  s.xit = 2.5 * a.xit + b.xit;
  s.xi = 2.5 * a.xi + b.xi;
  for (const LinearFunctional *f : {&d, &e})
    CHECK(f->apply(s) == doctest::Approx(2.5 * f->apply(a) + f->apply(b)).epsilon(1e-12));
}

TEST_CASE("plan evaluation matches standalone functionals") {
  const MvnCalibration c = calibrate_KH(HurstIndex(0.7), 1e-8);
  std::vector<std::pair<double, double>> qs = {{1.0, 0.1}, {1.0, 0.01}, {1.2, 0.05}};
  auto part = std::make_shared<NoisePartition>(
      c, 1.5, policy_for_queries(HurstIndex(0.7), 0.6, qs));
  std::vector<LocalQuery> lq;
  for (auto [t, h] : qs)
    lq.push_back({t, h});
  const DecompositionPlan plan(c, part, 0.6, lq);
  RngStream r = make_rng(5, 0);
  const NoiseGrid noise = sample_noise(part, r);
  std::vector<LocalDecomp> out;
  plan.evaluate(noise, out);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    LinearFunctional d, e;
    build_local_functionals(c, *part, qs[i].first, qs[i].second, 0.6, &d, &e);
    CHECK(out[i].localized == doctest::Approx(d.apply(noise)).epsilon(1e-13));
    CHECK(out[i].error == doctest::Approx(e.apply(noise)).epsilon(1e-13));
  }
}

TEST_CASE("localization window preconditions") {
  const MvnCalibration c = calibrate_KH(HurstIndex(0.3), 1e-8);
  auto part = std::make_shared<NoisePartition>(
      c, 1.5, policy_for_queries(HurstIndex(0.3), 0.5, {{0.5, 0.05}}));
  LinearFunctional d, e;
  // h > t^{1/alpha}
  CHECK_THROWS_AS(build_local_functionals(c, *part, 0.1, 0.2, 0.5, &d, &e), RangeError);
  // t + h beyond the noise
  CHECK_THROWS_AS(build_local_functionals(c, *part, 1.45, 0.1, 0.5, &d, &e), RangeError);
  // window edge not on the partition
  CHECK_THROWS_AS(build_local_functionals(c, *part, 0.7, 0.0123, 0.5, &d, &e),
                  AlignmentError);
}

TEST_CASE("error scaling: Brownian case is degenerate") {
  const ExponentFit f = estimate_error_scaling(
      HurstIndex(0.5), 0.7, 1.0, TimeGrid::geometric(1e-3, 1e-1, 6), 10, make_rng(1, 0));
  CHECK(f.status == FitStatus::degenerate_zero);
}

TEST_CASE("error scaling: analytic slope tracks beta") {
  for (auto [H, a] : {std::pair{0.3, 0.5}, std::pair{0.7, 0.8}}) {
    const ExponentFit f = estimate_error_scaling(
        HurstIndex(H), a, 1.0, TimeGrid::geometric(std::ldexp(1.0, -10), 0.125, 7), 200,
        make_rng(1, 0));
    REQUIRE(f.status == FitStatus::ok);
    CHECK(f.diagnostics.at("analytic_slope") >= beta_exponent(H, a) - 0.05);
    CHECK(f.slope == doctest::Approx(f.diagnostics.at("analytic_slope")).epsilon(0.05));
  }
}

TEST_CASE("error scaling: grid preconditions") {
  CHECK_THROWS(estimate_error_scaling(HurstIndex(0.3), 0.5, 1.0,
                                      TimeGrid::uniform(0.01, 0.01, 8), 10, make_rng(1, 0)));
  CHECK_THROWS(estimate_error_scaling(HurstIndex(0.3), 0.5, 1.0,
                                      TimeGrid::geometric(1e-3, 1e-1, 3), 10, make_rng(1, 0)));
}

TEST_CASE("sup error: refining the partition leaves the slope stable") {
  const TimeGrid b = TimeGrid::geometric(std::ldexp(1.0, -8), 0.125, 5);
  SupLatticeOptions coarse, fine;
  coarse.t_points = 8;
  fine.t_points = 8;
  fine.partition_level = 1;
  const auto f0 = estimate_sup_error_scaling(HurstIndex(0.3), 0.5, {1.0, 1.5}, b, 100,
                                             make_rng(2, 0), {}, coarse);
  const auto f1 = estimate_sup_error_scaling(HurstIndex(0.3), 0.5, {1.0, 1.5}, b, 100,
                                             make_rng(2, 0), {}, fine);
  CHECK(std::abs(f0.slope - f1.slope) < 0.1);
  CHECK(estimate_sup_error_scaling(HurstIndex(0.5), 0.5, {1.0, 1.5}, b, 10, make_rng(2, 0))
            .status == FitStatus::degenerate_zero);
  CHECK_THROWS_AS(estimate_sup_error_scaling(HurstIndex(0.3), 0.5, {1.0, 1.5},
                                             TimeGrid::geometric(0.01, 0.5, 5), 10,
                                             make_rng(2, 0)),
                  RangeError);
}

TEST_CASE("moduli ratios stay bounded") {
  std::vector<ModulusPair> pairs;
  for (int k = 0; k < 6; ++k)
    pairs.push_back({1.0, 0.01, 1.0 + 0.5 * std::ldexp(1.0, -k), 0.01});
  for (int k = 1; k <= 6; ++k)
    pairs.push_back({1.0, 0.001, 1.0, 0.001 * std::pow(100.0, k / 6.0)});
  for (double H : {0.3, 0.5, 0.7}) {
    const ModulusReport rep = verify_moduli(HurstIndex(H), 0.7, pairs, 400, make_rng(4, 0));
    REQUIRE(rep.rows.size() == pairs.size());
    for (const auto &row : rep.rows) {
      CHECK(std::isfinite(row.ratio));
      CHECK(row.l2_distance >= 0);
    }
    CHECK(rep.max_ratio < 10);
  }
}
