#include "fbmlab/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fbmlab/harness/csv.hpp"

namespace fbmlab::harness {

namespace {

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else if (c == '&')
      out += "&amp;";
    else
      out += c;
  }
  return out;
}

} // namespace

std::string loglog_svg(const ExponentFit &fit, const std::string &title,
                       const std::string &x_label, const std::string &y_label) {
  constexpr double W = 640, Hh = 440, L = 70, R = 20, T = 40, B = 50;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
     << Hh << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\">" << escape(title)
     << "</text>\n";
  if (fit.points.empty()) {
    os << "<text x=\"" << W / 2 << "\" y=\"" << Hh / 2
       << "\" text-anchor=\"middle\">no fit points (" << to_string(fit.status)
       << ")</text>\n</svg>\n";
    return os.str();
  }
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto &p : fit.points) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y - 2 * p.sigma);
    y1 = std::max(y1, p.y + 2 * p.sigma);
  }
  if (x1 - x0 < 1e-12) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double px = (W - L - R) / (x1 - x0), py = (Hh - T - B) / (y1 - y0);
  auto sx = [&](double x) { return L + (x - x0) * px; };
  auto sy = [&](double y) { return Hh - B - (y - y0) * py; };

  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R
     << "\" height=\"" << Hh - T - B << "\" fill=\"none\" stroke=\"#444\"/>\n";
  // Band: lines through the weighted centroid with the CI slopes.
  double xc = 0, yc = 0;
  for (const auto &p : fit.points) {
    xc += p.x;
    yc += fit.intercept + fit.slope * p.x;
  }
  xc /= static_cast<double>(fit.points.size());
  yc /= static_cast<double>(fit.points.size());
  if (fit.status == FitStatus::ok) {
    auto line_at = [&](double slope, double x) { return yc + slope * (x - xc); };
    os << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" points=\"";
    for (double x : {x0, x1})
      os << sx(x) << "," << sy(std::max(line_at(fit.ci95.lo, x), line_at(fit.ci95.hi, x)))
         << " ";
    for (double x : {x1, x0})
      os << sx(x) << "," << sy(std::min(line_at(fit.ci95.lo, x), line_at(fit.ci95.hi, x)))
         << " ";
    os << "\"/>\n";
    os << "<line x1=\"" << sx(x0) << "\" y1=\"" << sy(line_at(fit.slope, x0))
       << "\" x2=\"" << sx(x1) << "\" y2=\"" << sy(line_at(fit.slope, x1))
       << "\" stroke=\"#08519c\" stroke-width=\"1.5\"/>\n";
  }
  for (const auto &p : fit.points) {
    if (p.sigma > 0)
      os << "<line x1=\"" << sx(p.x) << "\" y1=\"" << sy(p.y - 2 * p.sigma)
         << "\" x2=\"" << sx(p.x) << "\" y2=\"" << sy(p.y + 2 * p.sigma)
         << "\" stroke=\"#333\"/>\n";
    os << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y)
       << "\" r=\"3\" fill=\"#d94801\"/>\n";
  }
  os << "<text x=\"" << W / 2 << "\" y=\"" << Hh - 15 << "\" text-anchor=\"middle\">"
     << escape(x_label) << "  [" << format_double(x0) << ", " << format_double(x1)
     << "]</text>\n"
     << "<text x=\"15\" y=\"" << Hh / 2 << "\" transform=\"rotate(-90 15 " << Hh / 2
     << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n"
     << "<text x=\"" << L + 8 << "\" y=\"" << T + 16 << "\">slope "
     << format_double(fit.slope) << "  CI [" << format_double(fit.ci95.lo) << ", "
     << format_double(fit.ci95.hi) << "]</text>\n</svg>\n";
  return os.str();
}

} // namespace fbmlab::harness
