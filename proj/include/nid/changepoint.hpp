// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nid/date.hpp"

namespace nid {

// Priors of the two-change-point model:
//   mu_i ~ Normal(mu_prior_mean, mu_prior_sd)
//   sigma ~ HalfCauchy(0, sigma_prior_scale)
//   tau1 ~ Uniform(0, T), tau2 | tau1 ~ Uniform(tau1, T)
// with the change points living on the time-index range [0, T].
struct CpModelSpec {
  double mu_prior_mean = 0.0;
  double mu_prior_sd = 0.5;
  double sigma_prior_scale = 0.5;
  std::size_t length = 0;  // T

  static CpModelSpec for_length(std::size_t t);
};

// Segment 1 covers t < tau1, segment 2 tau1 <= t < tau2, segment 3 t >= tau2.
struct CpParams {
  double mu1 = 0, mu2 = 0, mu3 = 0;
  double sigma = 1;
  double tau1 = 0, tau2 = 0;

  bool operator==(const CpParams&) const = default;
};

inline constexpr std::array<const char*, 6> kCpParamNames = {"mu1", "mu2", "mu3", "sigma", "tau1", "tau2"};

// Unnormalized log density; -infinity outside the support. Throws on
// non-finite observations or when y does not match spec.length.
double log_posterior(const CpParams& theta, std::span<const double> y, const CpModelSpec& spec);

struct SamplerOptions {
  int chains = 4;
  int draws = 1000;   // retained per chain
  int warmup = 1000;  // discarded per chain; proposal scales adapt only here
  std::uint64_t seed = 0;
};

struct ChainStats {
  double tau_acceptance = 0;    // local random-walk moves on (tau1, tau2)
  double sigma_acceptance = 0;
  double tau_scale = 0;         // adapted proposal scales at the end of warmup
  double sigma_scale = 0;
};

struct ChangePointPosterior {
  // Chain-major: chain c occupies [c * draws, (c + 1) * draws).
  std::vector<CpParams> samples;
  int chains = 0;
  int draws = 0;
  std::uint64_t seed = 0;
  std::array<double, 6> rhat{};
  std::vector<ChainStats> chain_stats;
  bool converged = false;

  std::vector<double> column(std::size_t param) const;
};

inline constexpr double kMaxRhat = 1.05;

// Metropolis-within-Gibbs. Per iteration: change points move by random-walk
// Metropolis on their posterior with the segment means integrated out,
// the means are drawn from their conjugate normal conditionals, and sigma
// takes a random-walk step on the log scale.
ChangePointPosterior sample_posterior(std::span<const double> y, const CpModelSpec& spec, const SamplerOptions& opts);

// Split-chain potential scale reduction for one parameter.
double split_rhat(const std::vector<double>& column, int chains, int draws);

// Shortest window over the sorted samples holding ceil(mass * n) of them.
std::pair<double, double> hdi(std::vector<double> samples, double mass);

// Date at floor(tau), clamped to the last date.
Date tau_to_date(double tau, std::span<const Date> dates);

struct Estimate {
  double mean = 0;
  std::pair<double, double> hdi;
};

struct NidReport {
  std::string source;
  std::size_t length = 0;
  double hdi_mass = 0.94;
  std::uint64_t seed = 0;

  Estimate tau1, tau2;  // in index units
  Date tau1_date, tau2_date;
  std::pair<Date, Date> tau1_hdi_dates, tau2_hdi_dates;
  double tau1_mode = 0, tau2_mode = 0;
  std::array<Estimate, 3> mu;
  Estimate sigma;

  double threshold = 0.97;
  double p_mu2_below_mu1 = 0;
  double p_mu2_below_mu3 = 0;
  bool nid_supported = false;
  bool converged = false;
  std::array<double, 6> rhat{};
};

// NID holds when P(mu2 < mu1) and P(mu2 < mu3) both exceed the threshold.
// Posterior probabilities are frequencies over the joint samples.
NidReport classify_nid(const ChangePointPosterior& post, std::span<const Date> dates, const std::string& source,
                       double threshold = 0.97, double hdi_mass = 0.94);

nlohmann::ordered_json report_to_json(const NidReport& r);

}  // namespace nid
