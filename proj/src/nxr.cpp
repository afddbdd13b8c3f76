// Apache License, Version 2.0, refer to LICENSE.txt

#include "nid/nxr.hpp"

#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "nid/error.hpp"

namespace nid {

std::string period_name(Period p) {
  switch (p) {
    case Period::pre:
      return "pre";
    case Period::nid:
      return "nid";
    case Period::post:
      return "post";
  }
  return "?";
}

SlopeFit fit_slope(const std::vector<NrPoint>& points, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw Error("alpha must lie in (0, 1)");
  const std::size_t n = points.size();
  if (n < 3) throw Error("slope fit needs at least 3 points, got " + std::to_string(n));

  double mx = 0, my = 0;
  for (const auto& p : points) {
    mx += p.novelty;
    my += p.resonance;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (const auto& p : points) {
    const double dx = p.novelty - mx;
    sxx += dx * dx;
    sxy += dx * (p.resonance - my);
  }
  if (!(sxx > 0)) throw Error("novelty constant in period");

  SlopeFit f;
  f.n = n;
  f.beta1 = sxy / sxx;
  f.beta0 = my - f.beta1 * mx;
  double sse = 0;
  for (const auto& p : points) {
    const double r = p.resonance - (f.beta0 + f.beta1 * p.novelty);
    sse += r * r;
  }
  const double dof = static_cast<double>(n - 2);
  const double se = std::sqrt(sse / dof / sxx);
  boost::math::students_t dist(dof);
  const double t = boost::math::quantile(dist, 1.0 - alpha / 2.0);
  f.ci_low = f.beta1 - t * se;
  f.ci_high = f.beta1 + t * se;
  return f;
}

std::array<SlopeFit, 3> period_slopes(const SignalSeries& series, Date tau1, Date tau2, double alpha) {
  if (!(tau1 < tau2)) throw Error("period boundaries must satisfy tau1 < tau2");
  std::array<std::vector<NrPoint>, 3> buckets;
  std::array<std::optional<Date>, 3> first, last;
  for (const auto& p : series.points) {
    if (!p.novelty || !p.resonance) continue;
    const int b = p.date < tau1 ? 0 : p.date < tau2 ? 1 : 2;
    buckets[b].push_back({*p.novelty, *p.resonance});
    if (!first[b]) first[b] = p.date;
    last[b] = p.date;
  }
  std::array<SlopeFit, 3> out;
  for (int b = 0; b < 3; ++b) {
    const auto period = static_cast<Period>(b);
    if (buckets[b].size() < 3) {
      throw Error("period '" + period_name(period) + "' has " + std::to_string(buckets[b].size()) +
                  " defined points, need at least 3");
    }
    try {
      out[b] = fit_slope(buckets[b], alpha);
    } catch (const Error& e) {
      throw Error("period '" + period_name(period) + "': " + e.what());
    }
    out[b].period = period;
    out[b].first_date = first[b];
    out[b].last_date = last[b];
  }
  return out;
}

}  // namespace nid
