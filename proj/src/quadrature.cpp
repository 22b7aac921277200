#include "fbmlab/quadrature.hpp"

#include "fbmlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>
#include <utility>
#include <vector>

namespace fbmlab {

namespace {

const double kXgk[8] = {0.991455371120812639206854697526329,
                        0.949107912342758524526189684047851,
                        0.864864423359769072789712788640926,
                        0.741531185599394439863864773280788,
                        0.586087235467691130294144845693013,
                        0.405845151377397166906606412076961,
                        0.207784955007898467600689403773245,
                        0.000000000000000000000000000000000};
const double kWgk[8] = {0.022935322010529224963732008058970,
                        0.063092092629978553290700663189204,
                        0.104790010322250183839876322541518,
                        0.140653259715525918745189590510238,
                        0.169004726639267902826583426598550,
                        0.190350578064785409913256402421014,
                        0.204432940075298892414161999234649,
                        0.209482141084727828012999174891714};
const double kWg[4] = {0.129484966168869693270611432679082,
                       0.279705391489276667901467771423780,
                       0.381830050505118944950369775488975,
                       0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel &o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)> &f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double s = f(c - x) + f(c + x);
    kron += kWgk[j] * s;
    if (j % 2 == 1)
      gauss += kWg[j / 2] * s;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

} // namespace

QuadratureResult integrate(const std::function<double(double)> &f, double a,
                           double b, double abs_tol, double rel_tol, int panels,
                           int max_intervals) {
  if (!(b > a))
    throw InvalidArgument("integrate needs b > a");
  panels = std::max(1, panels);
  std::priority_queue<Panel> heap;
  QuadratureResult r;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + (b - a) * i / panels;
    const double hi = i + 1 == panels ? b : a + (b - a) * (i + 1) / panels;
    heap.push(gk15(f, lo, hi));
    r.evaluations += 15;
  }
  auto totals = [&heap]() {
    auto copy = heap;
    std::vector<Panel> all;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    // Smallest contributions first for a well-conditioned total.
    double v = 0, e = 0;
    for (auto it = all.rbegin(); it != all.rend(); ++it) {
      v += it->value;
      e += it->error;
    }
    return std::pair<double, double>(v, e);
  };
  double value = 0, error = 0;
  std::tie(value, error) = totals();
  for (;;) {
    if (error <= std::max(abs_tol, rel_tol * std::abs(value))) {
      std::tie(value, error) = totals();
      if (error <= std::max(abs_tol, rel_tol * std::abs(value))) {
        r.converged = true;
        break;
      }
    }
    if (static_cast<int>(heap.size()) >= max_intervals)
      break;
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = gk15(f, worst.a, mid), right = gk15(f, mid, worst.b);
    heap.push(left);
    heap.push(right);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    r.evaluations += 30;
  }
  std::tie(value, error) = totals();
  r.value = value;
  r.error = error;
  return r;
}

} // namespace fbmlab
