#pragma once

#include <memory>
#include <vector>

#include "fbmlab/fbm/generators.hpp"
#include "fbmlab/fit.hpp"
#include "fbmlab/mvn/local.hpp"
#include "fbmlab/parallel.hpp"

namespace fbmlab {

enum class CrossingTarget { path_B, localized_D };

// discrete: the constraint is checked on the ladder points only.
// bridge: each ladder interval also carries the Brownian-bridge probability
// of staying inside the linearized boundary (H = 1/2 only).
// automatic: bridge at H = 1/2, discrete otherwise.
enum class Monitoring { automatic, discrete, bridge };

struct CrossingQuery {
  HurstIndex hurst{0.5};
  double theta = 1.0;
  double h_lo = 0.01;
  double h_hi = 1.0;
  double points_per_decade = 32;
  CrossingTarget target = CrossingTarget::path_B;
  double alpha = 0.7; // localized_D only
  double t = 1.0;     // localized_D only
  Monitoring monitoring = Monitoring::automatic;

  void validate() const;
  bool uses_bridge() const;
};

const char *to_string(CrossingTarget target);

// Monitoring ladder and sampler for one query. For path_B the process is
// s -> B(s); for localized_D it is h -> D_alpha(t, h).
class CrossingEngine {
public:
  struct Workspace {
    Eigen::VectorXd z;
    Eigen::VectorXd values;
    std::vector<double> local;
  };

  // fit_h: the levels at which survival is reported; each becomes a ladder
  // anchor. Empty means {h_lo}.
  CrossingEngine(const CrossingQuery &q, std::vector<double> fit_h = {});

  const CrossingQuery &query() const { return query_; }
  const std::vector<double> &ladder() const { return ladder_; }
  const std::vector<double> &fit_levels() const { return fit_h_; }

  void sample(RngStream &rng, Workspace &ws) const;
  // weights[j] = survival weight for the constraint on [fit_h[j], h_hi];
  // 0/1 for discrete monitoring, in [0,1] with the bridge factor.
  void survival(const Eigen::VectorXd &values, double theta,
                std::vector<double> &weights) const;

private:
  CrossingQuery query_;
  std::vector<double> fit_h_;
  std::vector<double> ladder_;
  std::vector<std::size_t> fit_index_;
  std::vector<double> bound_unit_; // s^H on the ladder
  bool bridge_;
  std::unique_ptr<CholeskyGenerator> chol_;
  std::shared_ptr<const NoisePartition> partition_;
  std::unique_ptr<DecompositionPlan> plan_;
};

struct SurvivalEstimate {
  double p_hat = 0;
  Interval ci{0, 0};
  double n_paths = 0;
  double survivors = 0;
  bool zero_survivors = false;
};

struct CrossingOptions {
  ParallelOptions parallel;
  std::size_t pilot_paths = 4000;
  double min_expected_survivors = 50;
  double ci_inflation = 1.5;
};

SurvivalEstimate crossing_survival(const CrossingQuery &q, std::size_t n_paths,
                                   const RngStream &rng,
                                   const CrossingOptions &opt = {});

// Weighted fit of -log P(h) against log(h_hi / h) over the ladder, using one
// shared path ensemble.
ExponentFit estimate_lambda(const CrossingQuery &q,
                            const std::vector<double> &h_ladder,
                            std::size_t n_paths, const RngStream &rng,
                            const CrossingOptions &opt = {});

struct RoyenReport {
  double p_a = 0, p_b = 0, p_ab = 0;
  double difference = 0;
  double std_error = 0;
  Interval ci{0, 0};
  bool pass = false;
  double pilot_a = 0, pilot_b = 0;
};

struct RoyenOptions {
  ParallelOptions parallel;
  std::size_t pilot_paths = 2000;
  // Evaluate the two events on independent paths instead of one path.
  bool independent_paths = false;
};

// Monte Carlo check of P(A and B) >= P(A) P(B) for the symmetric events
// {|B(s)| <= theta s^H on ladder_a} and the same on ladder_b.
RoyenReport royen_mc_check(HurstIndex H, double theta,
                           const std::vector<double> &ladder_a,
                           const std::vector<double> &ladder_b,
                           std::size_t n_paths, const RngStream &rng,
                           const RoyenOptions &opt = {});

} // namespace fbmlab
