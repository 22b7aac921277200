#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fbmlab/exponent/crossing.hpp"
#include "fbmlab/exponent/kummer.hpp"

using namespace fbmlab;

TEST_CASE("Kummer M special cases") {
  for (double z : {-3.0, -0.5, 0.0, 0.7, 2.0}) {
    CHECK(kummer_M(-1.0, 0.5, z) == doctest::Approx(1 - 2 * z).epsilon(1e-14));
    CHECK(kummer_M(1.3, 1.3, z) == doctest::Approx(std::exp(z)).epsilon(1e-12));
  }
  CHECK(kummer_M(0.7, 2.2, 0.0) == 1.0);
  // M(1, 2, z) = (e^z - 1) / z
  CHECK(kummer_M(1.0, 2.0, 1.5) == doctest::Approx(std::expm1(1.5) / 1.5).epsilon(1e-13));
  CHECK_THROWS_AS(kummer_M(1.0, -2.0, 1.0), InvalidArgument);
  CHECK(static_cast<double>(kummer_M<long double>(-1.0L, 0.5L, 0.25L)) ==
        doctest::Approx(0.5));
}

TEST_CASE("exact Brownian exponent at theta = 1") {
  const KummerRoot r = lambda_exact_bm(1.0);
  CHECK(std::abs(r.lambda_value - 1.0) < 1e-10);
  CHECK(r.residual < 1e-10);
  CHECK(r.bracket.lo <= r.lambda_value);
  CHECK(r.bracket.hi >= r.lambda_value);
}

TEST_CASE("exponent is strictly decreasing in theta") {
  double prev = lambda_exact_bm(0.3).lambda_value;
  for (double th = 0.4; th <= 4.0; th += 0.1) {
    const double l = lambda_exact_bm(th).lambda_value;
    CHECK(l < prev);
    prev = l;
  }
}

TEST_CASE("root satisfies the Kummer equation") {
  for (double th : {0.5, 0.8, 1.5, 2.0, 3.0}) {
    const double l = lambda_exact_bm(th).lambda_value;
    CHECK(std::abs(kummer_M(-l, 0.5, th * th / 2)) < 1e-9);
  }
}

TEST_CASE("inverse map") {
  const double th = theta_for_lambda_exact_bm(0.5);
  CHECK(lambda_exact_bm(th).lambda_value == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(th > 1.0);
  CHECK(theta_for_lambda_exact_bm(1.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("theta outside the supported range") {
  CHECK_THROWS_AS(lambda_exact_bm(0.1), RangeError);
  CHECK_THROWS_AS(lambda_exact_bm(5.0), RangeError);
}

TEST_CASE("crossing query validation") {
  CrossingQuery q;
  q.theta = -1;
  CHECK_THROWS_AS(q.validate(), InvalidArgument);
  q = {};
  q.hurst = HurstIndex(0.3);
  q.monitoring = Monitoring::bridge;
  CHECK_THROWS_AS(q.validate(), InvalidArgument);
  q = {};
  q.points_per_decade = 8;
  CHECK_THROWS_AS(q.validate(), InvalidArgument);
  q = {};
  q.target = CrossingTarget::localized_D;
  q.t = 0.5;
  CHECK_THROWS_AS(q.validate(), InvalidArgument);
  q = {};
  CHECK(q.uses_bridge());
  q.hurst = HurstIndex(0.7);
  CHECK_FALSE(q.uses_bridge());
}

TEST_CASE("single-point ladder reduces to a Gaussian probability") {
  CrossingQuery q;
  q.theta = 1.0;
  q.h_lo = q.h_hi = 1.0;
  const std::size_t n = 20000;
  const SurvivalEstimate e = crossing_survival(q, n, make_rng(3, 0));
  const double p = 2 * normal_cdf(1.0) - 1;
  CHECK(std::abs(e.p_hat - p) < 4 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("survival is monotone along the ladder and worker independent") {
  CrossingQuery q;
  q.hurst = HurstIndex(0.3);
  q.theta = 1.5;
  std::vector<double> lad{std::ldexp(1.0, -2), std::ldexp(1.0, -3), std::ldexp(1.0, -4),
                          std::ldexp(1.0, -5)};
  q.h_lo = lad.back();
  CrossingOptions o1, o3;
  o1.pilot_paths = o3.pilot_paths = 500;
  o3.parallel.workers = 3;
  const ExponentFit a = estimate_lambda(q, lad, 3000, make_rng(6, 0), o1);
  const ExponentFit b = estimate_lambda(q, lad, 3000, make_rng(6, 0), o3);
  CHECK(a.slope == b.slope);
  CHECK(a.ci95.lo == b.ci95.lo);
  REQUIRE(a.points.size() >= 3);
  // Survival over [h, h_hi] can only shrink as h decreases.
  for (const auto &p : a.points)
    for (const auto &r : a.points)
      if (p.abscissa < r.abscissa)
        CHECK(p.value <= r.value);
  CHECK(a.diagnostics.count("adjacent_correlation") == 1);
}

TEST_CASE("estimate_lambda needs three usable points") {
  CrossingQuery q;
  q.theta = 1.0;
  q.h_lo = 0.1;
  CHECK_THROWS_AS(estimate_lambda(q, {0.5, 0.25}, 100, make_rng(1, 0)), RangeError);
  // Tiny ensembles drop every point in preflight.
  CrossingOptions o;
  o.pilot_paths = 100;
  CHECK_THROWS_AS(estimate_lambda(q, {0.4, 0.2, 0.1}, 100, make_rng(1, 0), o), RangeError);
}

TEST_CASE("Brownian exponent estimate is near the oracle (short run)") {
  CrossingQuery q;
  q.theta = 1.0;
  q.h_lo = std::ldexp(1.0, -7);
  std::vector<double> lad;
  for (int k = 3; k <= 7; ++k)
    lad.push_back(std::ldexp(1.0, -k));
  const ExponentFit f = estimate_lambda(q, lad, 20000, make_rng(12, 0));
  CHECK(f.status == FitStatus::ok);
  CHECK(std::abs(f.slope - 1.0) < 0.2);
}

TEST_CASE("Royen check: positive correlation and preconditions") {
  std::vector<double> a, b;
  for (int k = 0; k <= 4; ++k)
    a.push_back(std::ldexp(1.0, -k));
  for (int k = 0; k <= 2; ++k)
    b.push_back(std::ldexp(1.0, -k));
  RoyenOptions o;
  o.pilot_paths = 500;
  const RoyenReport r = royen_mc_check(HurstIndex(0.5), 1.5, a, b, 5000, make_rng(1, 0), o);
  CHECK(r.pass);
  CHECK(r.p_ab <= std::min(r.p_a, r.p_b));
  CHECK(r.std_error > 0);
  CHECK_THROWS_AS(royen_mc_check(HurstIndex(0.5), 0.05, a, b, 1000, make_rng(1, 0), o),
                  InvalidArgument);
}
