#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace fbmlab {

double normal_cdf(double x);
double normal_quantile(double p);

struct Interval {
  double lo;
  double hi;
};

// Wilson score interval for a proportion p_hat observed over n trials.
Interval wilson_interval(double p_hat, double n, double z = 1.959963984540054);

struct KsResult {
  double statistic;
  double p_value;
};

double kolmogorov_sf(double lambda);
KsResult ks_two_sample(std::vector<double> x, std::vector<double> y);

double mean(const Eigen::Ref<const Eigen::VectorXd> &x);
double sample_variance(const Eigen::Ref<const Eigen::VectorXd> &x);
double median(std::vector<double> x);
double pearson(const Eigen::Ref<const Eigen::VectorXd> &x,
               const Eigen::Ref<const Eigen::VectorXd> &y);

// Two-sided Student t quantile at 97.5% for small degrees of freedom.
double student_t975(int dof);

// Streaming first and second moments, merged in a fixed order.
struct Moments {
  double n = 0;
  double sum = 0;
  double sum_sq = 0;

  void add(double x) {
    n += 1;
    sum += x;
    sum_sq += x * x;
  }
  void merge(const Moments &o) {
    n += o.n;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  double mean() const { return sum / n; }
  double second() const { return sum_sq / n; }
  double variance() const;
  double stderr_mean() const;
};

} // namespace fbmlab
