#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fbmlab/fbm/covariance.hpp"
#include "fbmlab/fbm/generators.hpp"
#include "fbmlab/stats.hpp"

using namespace fbmlab;

TEST_CASE("Cholesky factor reproduces the covariance") {
  for (double H : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const TimeGrid g = TimeGrid::geometric(0.01, 2.0, 40);
    const CholeskyGenerator gen(HurstIndex(H), g);
    const Eigen::MatrixXd C = fbm_cov_matrix<double>(g.points(), H);
    const Eigen::MatrixXd LLt = gen.factor() * gen.factor().transpose();
    CHECK((LLt - C).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Cholesky grid with zero keeps B(0) = 0") {
  const TimeGrid g = TimeGrid::uniform(0.0, 0.25, 5);
  RngStream r = make_rng(1, 0);
  const FbmPath p = generate_cholesky(HurstIndex(0.3), g, r);
  CHECK(p.values[0] == 0.0);
  CHECK(p.generator == GeneratorTag::cholesky);
  CHECK(p.seed == 1);
}

TEST_CASE("near-duplicate times are reported with their index") {
  Eigen::VectorXd t(4);
  t << 0.1, 0.2, 0.2 * (1 + 1e-15), 0.5;
  try {
    CholeskyGenerator gen(HurstIndex(0.5), TimeGrid(t));
    FAIL("expected a factorization failure");
  } catch (const FactorizationError &e) {
    CHECK(e.index() == 2);
    CHECK(e.pivot() <= 1e-12);
  }
}

TEST_CASE("Cholesky grid size is capped") {
  CHECK_THROWS_AS(CholeskyGenerator(HurstIndex(0.5), TimeGrid::uniform(0.001, 0.001, 4097)),
                  InvalidArgument);
  CholeskyOptions opt;
  opt.max_points = 16;
  CHECK_THROWS_AS(CholeskyGenerator(HurstIndex(0.5), TimeGrid::uniform(0.1, 0.1, 17), opt),
                  InvalidArgument);
}

TEST_CASE("circulant eigenvalues are nonnegative across H") {
  for (int k = 1; k <= 19; ++k) {
    const Eigen::VectorXd ev = circulant_eigenvalues(HurstIndex(k / 20.0), 1024);
    CHECK(ev.minCoeff() >= CirculantGenerator::kEigenTolerance);
  }
}

TEST_CASE("circulant path layout and determinism") {
  const CirculantGenerator gen(HurstIndex(0.7), 256, 1.0 / 256);
  RngStream a = make_rng(9, 0), b = make_rng(9, 0);
  const FbmPath p = gen.sample(a), q = gen.sample(b);
  REQUIRE(p.values.size() == 257);
  CHECK(p.values[0] == 0.0);
  CHECK(p.grid.back() == doctest::Approx(1.0));
  CHECK((p.values.array() == q.values.array()).all());
  CHECK_THROWS(CirculantGenerator(HurstIndex(0.5), 100, 0.01));
}

TEST_CASE("circulant scaling: halving dt scales values by 2^-H") {
  const double H = 0.3;
  const CirculantGenerator g1(HurstIndex(H), 512, 1.0 / 512), g2(HurstIndex(H), 512, 1.0 / 1024);
  RngStream a = make_rng(4, 0), b = make_rng(4, 0);
  const FbmPath p = g1.sample(a), q = g2.sample(b);
  const double f = std::pow(0.5, H);
  for (Eigen::Index i = 0; i < p.values.size(); ++i)
    CHECK(q.values[i] == doctest::Approx(f * p.values[i]).epsilon(1e-12));
}

TEST_CASE("circulant increments have the fGn covariance (MC)") {
  const double H = 0.7;
  const CirculantGenerator gen(HurstIndex(H), 64, 1.0);
  const int N = 4000;
  RngStream base = make_rng(11, 0);
  Eigen::VectorXd v;
  double s0 = 0, s1 = 0, s0sq = 0, s1sq = 0;
  for (int i = 0; i < N; ++i) {
    RngStream r = base.substream(static_cast<std::uint64_t>(i));
    gen.sample_values(r, v);
    const double x0 = v[11] - v[10], x1 = v[12] - v[11];
    s0 += x0 * x0;
    s1 += x0 * x1;
    s0sq += x0 * x0 * x0 * x0;
    s1sq += x0 * x1 * x0 * x1;
  }
  const double m0 = s0 / N, m1 = s1 / N;
  const double se0 = std::sqrt((s0sq / N - m0 * m0) / N);
  const double se1 = std::sqrt((s1sq / N - m1 * m1) / N);
  CHECK(std::abs(m0 - fgn_autocov<double>(0, H)) < 5 * se0);
  CHECK(std::abs(m1 - fgn_autocov<double>(1, H)) < 5 * se1);
}
