// Apache License, Version 2.0, refer to LICENSE.txt

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "doctest.h"
#include "nid/changepoint.hpp"
#include "nid/error.hpp"
#include "nid/rng.hpp"
#include "nid/synth.hpp"
#include "oracles/cp_oracle.hpp"

using namespace nid;

namespace {

SynthSeries reference_series(std::uint64_t seed) {
  SynthSeriesSpec spec;
  spec.seed = seed;
  return gen_series(spec);
}

double mean_of(const std::vector<double>& xs) {
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

std::vector<double> null_series(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  boost::random::normal_distribution<double> g(0.2, 0.02);
  std::vector<double> y(n);
  for (auto& v : y) v = g(rng);
  return y;
}

}  // namespace

TEST_CASE("log density matches a hand-evaluated case") {
  // T = 3, y = 0, mu = 0, sigma = 1, tau = (1, 2); components evaluated at 30 digits.
  const std::vector<double> y{0, 0, 0};
  const CpParams theta{0, 0, 0, 1, 1, 2};
  CHECK(log_posterior(theta, y, CpModelSpec::for_length(3)) ==
        doctest::Approx(-6.5938225639398654531524818541).epsilon(1e-14));
}

TEST_CASE("log density outside the support") {
  const std::vector<double> y{0.1, 0.2, 0.3, 0.4};
  auto spec = CpModelSpec::for_length(4);
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(log_posterior({0, 0, 0, 1, 2, 2}, y, spec) == ninf);
  CHECK(log_posterior({0, 0, 0, 1, 3, 2}, y, spec) == ninf);
  CHECK(log_posterior({0, 0, 0, 1, -0.5, 2}, y, spec) == ninf);
  CHECK(log_posterior({0, 0, 0, 1, 1, 4.5}, y, spec) == ninf);
  CHECK(log_posterior({0, 0, 0, 0, 1, 2}, y, spec) == ninf);
  CHECK(log_posterior({0, 0, 0, -1, 1, 2}, y, spec) == ninf);
  CHECK(std::isfinite(log_posterior({0, 0, 0, 1, 0, 4}, y, spec)));

  const std::vector<double> bad{0.1, std::nan(""), 0.3, 0.4};
  CHECK_THROWS_AS(log_posterior({0, 0, 0, 1, 1, 2}, bad, spec), Error);
  CHECK_THROWS_AS(log_posterior({0, 0, 0, 1, 1, 2}, y, CpModelSpec::for_length(5)), Error);
}

TEST_CASE("property: log density agrees with an independent transcription") {
  Rng rng(31);
  boost::random::uniform_real_distribution<double> mu(-1, 1), sig(0.01, 2), y01(0, 1);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 6 + rng() % 40;
    std::vector<double> y(n);
    for (auto& v : y) v = mu(rng);
    const double t1 = y01(rng) * static_cast<double>(n);
    const double t2 = t1 + y01(rng) * (static_cast<double>(n) - t1);
    const CpParams th{mu(rng), mu(rng), mu(rng), sig(rng), t1, t2};
    const double a = log_posterior(th, y, CpModelSpec::for_length(n));
    const double b = oracle::cp_log_density(th.mu1, th.mu2, th.mu3, th.sigma, th.tau1, th.tau2, y);
    CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("sampler argument checks") {
  auto y = null_series(20, 1);
  auto spec = CpModelSpec::for_length(20);
  SamplerOptions o;
  o.draws = 999;
  CHECK_THROWS_AS(sample_posterior(y, spec, o), Error);
  o.draws = 1000;
  o.chains = 1;
  CHECK_THROWS_AS(sample_posterior(y, spec, o), Error);
  auto short_y = null_series(5, 1);
  CHECK_THROWS_AS(sample_posterior(short_y, CpModelSpec::for_length(5), SamplerOptions{}), Error);
}

TEST_CASE("samples respect the ordering constraint and are deterministic") {
  auto s = reference_series(2);
  SamplerOptions o;
  o.seed = 99;
  auto a = sample_posterior(s.values, CpModelSpec::for_length(s.values.size()), o);
  auto b = sample_posterior(s.values, CpModelSpec::for_length(s.values.size()), o);
  REQUIRE(a.samples.size() == 4000);
  CHECK(a.samples == b.samples);
  CHECK(a.rhat == b.rhat);
  for (const auto& p : a.samples) {
    CHECK(p.tau1 >= 0);
    CHECK(p.tau1 < p.tau2);
    CHECK(p.tau2 <= 210);
    CHECK(p.sigma > 0);
  }
  o.seed = 100;
  auto c = sample_posterior(s.values, CpModelSpec::for_length(s.values.size()), o);
  CHECK_FALSE(c.samples == a.samples);
}

TEST_CASE("recovery at low noise") {
  SynthSeriesSpec spec;
  spec.sigma = 0.01;
  spec.seed = 4;
  auto s = gen_series(spec);
  SamplerOptions o;
  o.seed = 4;
  auto post = sample_posterior(s.values, CpModelSpec::for_length(210), o);
  CHECK(post.converged);
  CHECK(std::abs(mean_of(post.column(4)) - 98) <= 2);
  CHECK(std::abs(mean_of(post.column(5)) - 133) <= 2);
  CHECK(std::abs(mean_of(post.column(0)) - 0.27) <= 0.005);
  CHECK(std::abs(mean_of(post.column(1)) - 0.15) <= 0.005);
  CHECK(std::abs(mean_of(post.column(2)) - 0.26) <= 0.005);
  for (const auto& st : post.chain_stats) {
    CHECK(st.sigma_acceptance > 0.2);
    CHECK(st.sigma_acceptance < 0.7);
  }
}

TEST_CASE("sigma posterior mean tracks the noise level") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = reference_series(100 + seed);
    SamplerOptions o;
    o.seed = seed;
    auto post = sample_posterior(s.values, CpModelSpec::for_length(210), o);
    const double m = mean_of(post.column(3));
    CHECK(m >= 0.015);
    CHECK(m <= 0.025);
  }
}

TEST_CASE("null series yields diffuse change points") {
  int wide = 0, rejected = 0;
  std::vector<Date> dates;
  for (int i = 0; i < 210; ++i) dates.push_back(*Date::parse("2019-12-01") + i);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto y = null_series(210, 500 + seed);
    SamplerOptions o;
    o.seed = seed;
    auto r = classify_nid(sample_posterior(y, CpModelSpec::for_length(210), o), dates, "S");
    const double w = std::max(r.tau1.hdi.second - r.tau1.hdi.first, r.tau2.hdi.second - r.tau2.hdi.first);
    wide += w > 52.5;
    rejected += !r.nid_supported;
  }
  CHECK(rejected >= 9);
  CHECK(wide >= 6);
}

TEST_CASE("split rhat") {
  std::vector<double> same(400, 3.0);
  CHECK(split_rhat(same, 4, 100) == 1.0);
  std::vector<double> stuck(400);
  for (std::size_t i = 0; i < 400; ++i) stuck[i] = static_cast<double>(i / 100);
  CHECK(split_rhat(stuck, 4, 100) == std::numeric_limits<double>::infinity());
  Rng rng(3);
  boost::random::normal_distribution<double> g;
  std::vector<double> iid(4000);
  for (auto& v : iid) v = g(rng);
  CHECK(split_rhat(iid, 4, 1000) < 1.01);
  std::vector<double> drift(4000);
  for (std::size_t i = 0; i < 4000; ++i) drift[i] = g(rng) + static_cast<double>(i % 1000) / 100.0;
  CHECK(split_rhat(drift, 4, 1000) > 1.5);
}

TEST_CASE("hdi") {
  CHECK(hdi(std::vector<double>(100, 0.5), 0.94) == std::pair{0.5, 0.5});

  std::vector<double> seq;
  for (int i = 100; i >= 1; --i) seq.push_back(i);
  // Brute force: every window of 94 consecutive values has width 93; the first wins.
  auto h = hdi(seq, 0.94);
  CHECK(h == std::pair{1.0, 94.0});

  Rng rng(7);
  boost::random::uniform_01<double> u;
  std::vector<double> uni(200000);
  for (auto& v : uni) v = u(rng);
  auto hu = hdi(uni, 0.94);
  CHECK(hu.second - hu.first == doctest::Approx(0.94).epsilon(0.01 / 0.94));

  auto all = hdi(seq, 1.0);
  CHECK(all == std::pair{1.0, 100.0});

  std::vector<double> skew;
  for (int i = 0; i < 60; ++i) skew.push_back(i < 50 ? 0.0 + i * 0.001 : 10.0 + i);
  auto hs = hdi(skew, 0.8);
  CHECK(hs.first == 0.0);
  CHECK(hs.second == doctest::Approx(0.047));

  CHECK_THROWS_AS(hdi(std::vector<double>(49, 1.0), 0.94), Error);
  CHECK_THROWS_AS(hdi(seq, 0.0), Error);
  CHECK_THROWS_AS(hdi(seq, 1.5), Error);
}

TEST_CASE("tau_to_date") {
  std::vector<Date> dates;
  for (int i = 0; i < 10; ++i) dates.push_back(*Date::parse("2020-03-01") + i);
  CHECK(tau_to_date(0, dates).iso() == "2020-03-01");
  CHECK(tau_to_date(3.7, dates).iso() == "2020-03-04");
  CHECK(tau_to_date(9.99, dates).iso() == "2020-03-10");
  CHECK(tau_to_date(10, dates).iso() == "2020-03-10");
  CHECK_THROWS_AS(tau_to_date(10.5, dates), Error);
  CHECK_THROWS_AS(tau_to_date(-1, dates), Error);
  CHECK_THROWS_AS(tau_to_date(1, std::vector<Date>{}), Error);
}

TEST_CASE("classify_nid") {
  SUBCASE("a pronounced dip is supported") {
    auto s = reference_series(8);
    SamplerOptions o;
    o.seed = 8;
    auto post = sample_posterior(s.values, CpModelSpec::for_length(210), o);
    auto r = classify_nid(post, s.dates, "Politiken");
    CHECK(r.nid_supported);
    CHECK(r.converged);
    CHECK(r.source == "Politiken");
    CHECK(std::abs(r.tau1_date - s.truth.tau_dates[0]) <= 3);
    CHECK(std::abs(r.tau2_date - s.truth.tau_dates[1]) <= 3);
    CHECK(r.mu[1].hdi.first < 0.15);
    CHECK(r.mu[1].hdi.second > 0.15);
    auto j = report_to_json(r);
    CHECK(j["nid_supported"] == true);
    CHECK(j["source"] == "Politiken");
  }
  SUBCASE("no change is not supported") {
    auto y = null_series(210, 42);
    std::vector<Date> dates;
    for (int i = 0; i < 210; ++i) dates.push_back(*Date::parse("2019-12-01") + i);
    SamplerOptions o;
    o.seed = 42;
    auto r = classify_nid(sample_posterior(y, CpModelSpec::for_length(210), o), dates, "S");
    CHECK_FALSE(r.nid_supported);
  }
  SUBCASE("even odds fall short of the threshold") {
    ChangePointPosterior post;
    post.chains = 1;
    post.draws = 1000;
    for (int i = 0; i < 1000; ++i) {
      const double m2 = i % 2 ? 0.1 : 0.3;
      post.samples.push_back({0.2, m2, 0.2, 0.02, 3.0, 6.0});
    }
    std::vector<Date> dates;
    for (int i = 0; i < 10; ++i) dates.push_back(*Date::parse("2020-01-01") + i);
    auto r = classify_nid(post, dates, "S");
    CHECK(r.p_mu2_below_mu1 == doctest::Approx(0.5));
    CHECK_FALSE(r.nid_supported);
    auto strict = classify_nid(post, dates, "S", 0.4);
    CHECK(strict.nid_supported);
  }
}

TEST_CASE("change point marginals match exact grid enumeration") {
  SynthSeriesSpec spec;
  spec.length = 12;
  spec.tau = {4, 8};
  spec.sigma = 0.06;
  spec.seed = 12;
  auto s = gen_series(spec);
  auto grid = oracle::tau_grid_posterior(s.values);
  SamplerOptions o;
  o.draws = 5000;
  o.warmup = 1000;
  o.seed = 12;
  auto post = sample_posterior(s.values, CpModelSpec::for_length(12), o);
  std::vector<std::vector<double>> freq(12, std::vector<double>(13, 0.0));
  for (const auto& p : post.samples) freq[std::size_t(p.tau1)][std::size_t(p.tau2)] += 1.0 / double(post.samples.size());
  double tv = 0;
  for (std::size_t a = 0; a < 12; ++a) {
    for (std::size_t b = 0; b <= 12; ++b) tv += 0.5 * std::abs(freq[a][b] - grid[a][b]);
  }
  MESSAGE("joint TV = " << tv);
  CHECK(tv <= 0.08);
}
