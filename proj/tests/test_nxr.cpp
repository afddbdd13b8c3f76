// Apache License, Version 2.0, refer to LICENSE.txt

#include <cmath>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "doctest.h"
#include "nid/error.hpp"
#include "nid/nxr.hpp"
#include "nid/rng.hpp"
#include "oracles/ols_oracle.hpp"

using namespace nid;

namespace {

SignalSeries series_from(const std::vector<NrPoint>& pts, Date start) {
  SignalSeries s;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    SignalPoint p;
    p.id = "d" + std::to_string(i);
    p.date = start + static_cast<long>(i);
    p.source = "S";
    p.novelty = pts[i].novelty;
    p.resonance = pts[i].resonance;
    p.transience = pts[i].novelty - pts[i].resonance;
    s.points.push_back(p);
  }
  s.valid_last = pts.empty() ? 0 : pts.size() - 1;
  return s;
}

}  // namespace

TEST_CASE("exact linear data gives an exact fit") {
  std::vector<NrPoint> pts;
  for (int x = 1; x <= 10; ++x) pts.push_back({double(x), 2.0 * x + 1});
  auto f = fit_slope(pts);
  CHECK(f.beta1 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.beta0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(f.ci_high - f.ci_low < 1e-12);
  CHECK(f.n == 10);
}

TEST_CASE("constant resonance gives zero slope") {
  std::vector<NrPoint> pts;
  for (int x = 0; x < 8; ++x) pts.push_back({0.1 * x, 0.3});
  auto f = fit_slope(pts);
  CHECK(f.beta1 == doctest::Approx(0.0));
  CHECK(f.beta0 == doctest::Approx(0.3));
}

TEST_CASE("fit agrees with the normal-equation oracle") {
  Rng rng(11);
  boost::random::uniform_real_distribution<double> ux(0.1, 0.5);
  boost::random::normal_distribution<double> noise(0, 0.05);
  for (std::size_t n : {10u, 100u}) {
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<NrPoint> pts;
      std::vector<double> x, y;
      for (std::size_t i = 0; i < n; ++i) {
        x.push_back(ux(rng));
        y.push_back(-0.07 + 0.39 * x.back() + noise(rng));
        pts.push_back({x.back(), y.back()});
      }
      auto f = fit_slope(pts);
      auto o = oracle::ols(x, y);
      const double t = n == 10 ? oracle::kT975Df8 : oracle::kT975Df98;
      CHECK(std::abs(f.beta1 - o.beta1) <= 1e-10 * std::abs(o.beta1));
      CHECK(std::abs(f.beta0 - o.beta0) <= 1e-10 * std::max(1.0, std::abs(o.beta0)));
      CHECK(std::abs(f.ci_low - (o.beta1 - t * o.se_beta1)) <= 1e-10 * std::abs(o.beta1));
      CHECK(std::abs(f.ci_high - (o.beta1 + t * o.se_beta1)) <= 1e-10 * std::abs(o.beta1));
    }
  }
}

TEST_CASE("alpha controls interval width") {
  std::vector<NrPoint> pts;
  std::vector<double> x, y;
  Rng rng(5);
  boost::random::normal_distribution<double> noise(0, 0.1);
  for (int i = 0; i < 20; ++i) {
    x.push_back(i * 0.05);
    y.push_back(x.back() + noise(rng));
    pts.push_back({x.back(), y.back()});
  }
  auto f = fit_slope(pts, 0.10);
  auto o = oracle::ols(x, y);
  CHECK((f.ci_high - f.ci_low) / 2 == doctest::Approx(oracle::kT95Df18 * o.se_beta1).epsilon(1e-10));
  CHECK_THROWS_AS(fit_slope(pts, 0.0), Error);
  CHECK_THROWS_AS(fit_slope(pts, 1.0), Error);
}

TEST_CASE("property: slope is invariant to shifting novelty") {
  Rng rng(6);
  boost::random::normal_distribution<double> noise(0, 0.05);
  std::vector<NrPoint> a, b;
  for (int i = 0; i < 30; ++i) {
    const double x = 0.2 + 0.01 * i;
    const double y = 0.5 * x + noise(rng);
    a.push_back({x, y});
    b.push_back({x + 3.0, y});
  }
  CHECK(fit_slope(a).beta1 == doctest::Approx(fit_slope(b).beta1).epsilon(1e-9));
}

TEST_CASE("interval covers the true slope at the nominal rate") {
  Rng rng(12);
  boost::random::uniform_real_distribution<double> ux(0.0, 1.0);
  boost::random::normal_distribution<double> noise(0, 0.05);
  int covered = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<NrPoint> pts;
    for (int i = 0; i < 100; ++i) {
      const double x = ux(rng);
      pts.push_back({x, 0.39 * x + noise(rng)});
    }
    auto f = fit_slope(pts);
    if (f.ci_low <= 0.39 && 0.39 <= f.ci_high) ++covered;
  }
  CHECK(covered >= 90);
}

TEST_CASE("degenerate fits raise errors") {
  CHECK_THROWS_WITH_AS(fit_slope({{1, 1}, {1, 2}, {1, 3}}), doctest::Contains("novelty constant in period"), Error);
  CHECK_THROWS_AS(fit_slope({{1, 1}, {2, 2}}), Error);
}

TEST_CASE("period slopes split by date") {
  std::vector<NrPoint> pts;
  Rng rng(13);
  boost::random::normal_distribution<double> noise(0, 0.01);
  for (int i = 0; i < 60; ++i) {
    const double x = 0.2 + 0.003 * (i % 17);
    const double slope = (i >= 20 && i < 40) ? 0.3 : 0.9;
    pts.push_back({x, slope * x + noise(rng)});
  }
  const Date start = *Date::parse("2020-01-01");
  auto s = series_from(pts, start);
  s.points[0].novelty.reset();
  s.points[0].resonance.reset();
  auto fits = period_slopes(s, start + 20, start + 40);
  CHECK(fits[0].period == Period::pre);
  CHECK(fits[0].n == 19);
  CHECK(fits[1].n == 20);
  CHECK(fits[2].n == 20);
  CHECK(fits[0].first_date->iso() == "2020-01-02");
  CHECK(fits[1].first_date->iso() == "2020-01-21");
  CHECK(fits[1].last_date->iso() == "2020-02-09");
  CHECK(fits[1].beta1 < fits[0].beta1);
  CHECK(fits[1].beta1 < fits[2].beta1);
  CHECK(fits[1].beta1 == doctest::Approx(0.3).epsilon(0.1));

  CHECK_THROWS_AS(period_slopes(s, start + 20, start + 20), Error);
  CHECK_THROWS_WITH_AS(period_slopes(s, start + 20, start + 21), doctest::Contains("'nid'"), Error);
  CHECK_THROWS_WITH_AS(period_slopes(s, start + 1, start + 40), doctest::Contains("'pre'"), Error);
}

TEST_CASE("period names") {
  CHECK(period_name(Period::pre) == "pre");
  CHECK(period_name(Period::nid) == "nid");
  CHECK(period_name(Period::post) == "post");
}
