#pragma once

#include <string>

#include "fbmlab/fit.hpp"

namespace fbmlab::harness {

// Log-log scatter of the fit points with the fitted line and its 95% band.
std::string loglog_svg(const ExponentFit &fit, const std::string &title,
                       const std::string &x_label, const std::string &y_label);

} // namespace fbmlab::harness
