// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nid/infodyn.hpp"

namespace nid {

enum class Period { pre, nid, post };

std::string period_name(Period p);

// Resonance regressed on novelty by ordinary least squares.
struct SlopeFit {
  double beta0 = 0;
  double beta1 = 0;
  double ci_low = 0;
  double ci_high = 0;
  std::size_t n = 0;
  Period period = Period::pre;
  // Inclusive date span of the points in the fit, when known.
  std::optional<Date> first_date;
  std::optional<Date> last_date;
};

struct NrPoint {
  double novelty;
  double resonance;
};

// Slope CI is the classical t interval with n - 2 degrees of freedom at level 1 - alpha.
SlopeFit fit_slope(const std::vector<NrPoint>& points, double alpha = 0.05);

// Fits over pre (date < tau1), nid (tau1 <= date < tau2) and post (date >= tau2),
// using the defined points of the series.
std::array<SlopeFit, 3> period_slopes(const SignalSeries& series, Date tau1, Date tau2, double alpha = 0.05);

}  // namespace nid
