// Apache License, Version 2.0, refer to LICENSE.txt

#include "nid/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "nid/error.hpp"
#include "nid/rng.hpp"

namespace nid {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double normal_logpdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
}

double half_cauchy_logpdf(double x, double scale) {
  const double z = x / scale;
  return std::log(2.0 / (std::numbers::pi * scale)) - std::log1p(z * z);
}

double log_tau_prior(double tau1, std::size_t length) {
  const double t = static_cast<double>(length);
  return -std::log(t) - std::log(t - tau1);
}

void check_observations(std::span<const double> y, const CpModelSpec& spec) {
  if (y.size() != spec.length) throw Error("series length does not match the model length");
  for (double v : y) {
    if (!std::isfinite(v)) throw Error("series contains a non-finite value");
  }
}

// Prefix sums give O(1) sufficient statistics for any segment [a, b).
class SegmentStats {
 public:
  explicit SegmentStats(std::span<const double> y) : sum_(y.size() + 1, 0.0), sq_(y.size() + 1, 0.0) {
    for (std::size_t t = 0; t < y.size(); ++t) {
      sum_[t + 1] = sum_[t] + y[t];
      sq_[t + 1] = sq_[t] + y[t] * y[t];
    }
  }
  struct Stat {
    double n, sum, sq;
  };
  Stat operator()(int a, int b) const {
    return {static_cast<double>(b - a), sum_[b] - sum_[a], sq_[b] - sq_[a]};
  }

 private:
  std::vector<double> sum_, sq_;
};

// log of the integral over mu of prior(mu) * prod_t Normal(y_t; mu, sigma).
double segment_log_marginal(const SegmentStats::Stat& s, double sigma, const CpModelSpec& spec) {
  if (s.n == 0) return 0.0;
  const double var = sigma * sigma;
  const double prior_var = spec.mu_prior_sd * spec.mu_prior_sd;
  const double prec = s.n / var + 1.0 / prior_var;
  const double b = s.sum / var + spec.mu_prior_mean / prior_var;
  return -s.n * (std::log(sigma) + kLogSqrt2Pi) - 0.5 * s.sq / var -
         0.5 * spec.mu_prior_mean * spec.mu_prior_mean / prior_var - 0.5 * std::log(prec * prior_var) +
         0.5 * b * b / prec;
}

struct ChainState {
  int tau1 = 0, tau2 = 0;
  std::array<double, 3> mu{};
  double sigma = 1;
};

class Chain {
 public:
  Chain(std::span<const double> y, const CpModelSpec& spec, std::uint64_t seed)
      : spec_(spec), stats_(y), length_(static_cast<int>(y.size())), rng_(seed) {
    double mean = 0, var = 0;
    for (double v : y) mean += v;
    mean /= length_;
    for (double v : y) var += (v - mean) * (v - mean);
    scale_hint_ = std::sqrt(var / std::max(1, length_ - 1));
    if (!(scale_hint_ > 0)) scale_hint_ = 1e-3;
  }

  void initialize() {
    // Random interior change points and an over-dispersed scale, so that
    // chains start apart and the split R-hat is informative.
    boost::random::uniform_int_distribution<int> cut(1, length_ - 1);
    int a = cut(rng_), b = cut(rng_);
    while (a == b) b = cut(rng_);
    s_.tau1 = std::min(a, b);
    s_.tau2 = std::max(a, b);
    s_.sigma = scale_hint_ * std::exp(normal_(rng_));
    draw_means();
    tau_scale_ = std::max(1.0, length_ / 10.0);
    shift_scale_ = tau_scale_;
    sigma_scale_ = 0.5;
  }

  void step(bool adapt, int iter) {
    const double gain = adapt ? 1.0 / std::sqrt(iter + 1.0) : 0.0;
    update_tau(gain);
    draw_means();
    update_sigma(gain);
  }

  const ChainState& state() const { return s_; }
  ChainStats stats() const {
    return {tau_tries_ ? static_cast<double>(tau_accepts_) / tau_tries_ : 0.0,
            sigma_tries_ ? static_cast<double>(sigma_accepts_) / sigma_tries_ : 0.0, tau_scale_, sigma_scale_};
  }
  void reset_counters() { tau_tries_ = tau_accepts_ = sigma_tries_ = sigma_accepts_ = 0; }

 private:
  double tau_log_target(int t1, int t2) const {
    return log_tau_prior(t1, spec_.length) + segment_log_marginal(stats_(0, t1), s_.sigma, spec_) +
           segment_log_marginal(stats_(t1, t2), s_.sigma, spec_) +
           segment_log_marginal(stats_(t2, length_), s_.sigma, spec_);
  }

  int integer_step(double scale) {
    int d = static_cast<int>(std::lround(normal_(rng_) * scale));
    if (d == 0) d = uniform_(rng_) < 0.5 ? -1 : 1;
    return d;
  }

  bool accept(double log_ratio) { return log_ratio >= 0 || std::log(uniform_(rng_)) < log_ratio; }

  void adapt_scale(double& scale, bool accepted, double gain, double target) {
    if (gain == 0) return;
    scale *= std::exp(gain * ((accepted ? 1.0 : 0.0) - target));
    scale = std::clamp(scale, 0.5, static_cast<double>(length_));
  }

  void update_tau(double gain) {
    double current = tau_log_target(s_.tau1, s_.tau2);

    // Occasional independent uniform draw over all ordered pairs (symmetric).
    if (uniform_(rng_) < 0.05) {
      boost::random::uniform_int_distribution<int> any(0, length_);
      int a = any(rng_), b = any(rng_);
      while (a == b) b = any(rng_);
      const int t1 = std::min(a, b), t2 = std::max(a, b);
      const double proposed = tau_log_target(t1, t2);
      if (accept(proposed - current)) {
        s_.tau1 = t1;
        s_.tau2 = t2;
        current = proposed;
      }
    }

    auto local_move = [&](int t1, int t2, double& scale) {
      ++tau_tries_;
      bool ok = false;
      if (t1 >= 0 && t1 < t2 && t2 <= length_) {
        const double proposed = tau_log_target(t1, t2);
        if (accept(proposed - current)) {
          s_.tau1 = t1;
          s_.tau2 = t2;
          current = proposed;
          ok = true;
        }
      }
      tau_accepts_ += ok;
      adapt_scale(scale, ok, gain, 0.3);
    };
    local_move(s_.tau1 + integer_step(tau_scale_), s_.tau2, tau_scale_);
    local_move(s_.tau1, s_.tau2 + integer_step(tau_scale_), tau_scale_);
    const int shift = integer_step(shift_scale_);
    local_move(s_.tau1 + shift, s_.tau2 + shift, shift_scale_);

    // Fixed-width jumps of up to kJump steps cross narrow troughs between
    // neighbouring modes that the adapted steps, once small, rarely clear.
    auto jump = [&](int t1, int t2) {
      if (!(t1 >= 0 && t1 < t2 && t2 <= length_)) return;
      const double proposed = tau_log_target(t1, t2);
      if (accept(proposed - current)) {
        s_.tau1 = t1;
        s_.tau2 = t2;
        current = proposed;
      }
    };
    jump(s_.tau1 + jump_step(), s_.tau2);
    jump(s_.tau1, s_.tau2 + jump_step());
  }

  int jump_step() {
    boost::random::uniform_int_distribution<int> d(1, kJump);
    return uniform_(rng_) < 0.5 ? -d(rng_) : d(rng_);
  }

  static constexpr int kJump = 5;

  void draw_means() {
    const std::array<std::pair<int, int>, 3> segs = {
        {{0, s_.tau1}, {s_.tau1, s_.tau2}, {s_.tau2, length_}}};
    const double var = s_.sigma * s_.sigma;
    const double prior_var = spec_.mu_prior_sd * spec_.mu_prior_sd;
    for (int i = 0; i < 3; ++i) {
      const auto st = stats_(segs[i].first, segs[i].second);
      const double prec = st.n / var + 1.0 / prior_var;
      const double mean = (st.sum / var + spec_.mu_prior_mean / prior_var) / prec;
      s_.mu[i] = mean + normal_(rng_) / std::sqrt(prec);
    }
  }

  double sigma_log_target(double sigma) const {
    const std::array<std::pair<int, int>, 3> segs = {
        {{0, s_.tau1}, {s_.tau1, s_.tau2}, {s_.tau2, length_}}};
    double ssr = 0;
    for (int i = 0; i < 3; ++i) {
      const auto st = stats_(segs[i].first, segs[i].second);
      ssr += st.sq - 2.0 * s_.mu[i] * st.sum + st.n * s_.mu[i] * s_.mu[i];
    }
    ssr = std::max(ssr, 0.0);
    return -length_ * std::log(sigma) - 0.5 * ssr / (sigma * sigma) +
           half_cauchy_logpdf(sigma, spec_.sigma_prior_scale);
  }

  void update_sigma(double gain) {
    ++sigma_tries_;
    const double step = sigma_scale_ * normal_(rng_);
    const double proposed = s_.sigma * std::exp(step);
    // Random walk on log(sigma); the Jacobian contributes the step itself.
    const double log_ratio = sigma_log_target(proposed) - sigma_log_target(s_.sigma) + step;
    const bool ok = std::isfinite(proposed) && proposed > 0 && accept(log_ratio);
    if (ok) s_.sigma = proposed;
    sigma_accepts_ += ok;
    if (gain != 0) {
      sigma_scale_ *= std::exp(gain * ((ok ? 1.0 : 0.0) - 0.44));
      sigma_scale_ = std::clamp(sigma_scale_, 1e-4, 10.0);
    }
  }

  const CpModelSpec spec_;
  SegmentStats stats_;
  int length_;
  Rng rng_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_01<double> uniform_;
  double scale_hint_ = 1;
  ChainState s_;
  double tau_scale_ = 1, shift_scale_ = 1, sigma_scale_ = 0.5;
  long tau_tries_ = 0, tau_accepts_ = 0, sigma_tries_ = 0, sigma_accepts_ = 0;
};

}  // namespace

CpModelSpec CpModelSpec::for_length(std::size_t t) {
  CpModelSpec s;
  s.length = t;
  return s;
}

double log_posterior(const CpParams& theta, std::span<const double> y, const CpModelSpec& spec) {
  check_observations(y, spec);
  const double t_len = static_cast<double>(spec.length);
  if (!(theta.sigma > 0) || !(theta.tau1 >= 0) || !(theta.tau1 < theta.tau2) || !(theta.tau2 <= t_len)) {
    return kNegInf;
  }
  double lp = 0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double td = static_cast<double>(t);
    const double mu = td < theta.tau1 ? theta.mu1 : td < theta.tau2 ? theta.mu2 : theta.mu3;
    lp += normal_logpdf(y[t], mu, theta.sigma);
  }
  for (double mu : {theta.mu1, theta.mu2, theta.mu3}) lp += normal_logpdf(mu, spec.mu_prior_mean, spec.mu_prior_sd);
  lp += half_cauchy_logpdf(theta.sigma, spec.sigma_prior_scale);
  lp += log_tau_prior(theta.tau1, spec.length);
  return lp;
}

std::vector<double> ChangePointPosterior::column(std::size_t param) const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    switch (param) {
      case 0: out.push_back(s.mu1); break;
      case 1: out.push_back(s.mu2); break;
      case 2: out.push_back(s.mu3); break;
      case 3: out.push_back(s.sigma); break;
      case 4: out.push_back(s.tau1); break;
      case 5: out.push_back(s.tau2); break;
      default: throw Error("unknown parameter index");
    }
  }
  return out;
}

double split_rhat(const std::vector<double>& column, int chains, int draws) {
  const int half = draws / 2;
  if (half < 2) throw Error("R-hat needs at least 4 draws per chain");
  const int m = 2 * chains;
  std::vector<double> means(m), vars(m);
  for (int c = 0; c < chains; ++c) {
    for (int h = 0; h < 2; ++h) {
      const auto* x = column.data() + static_cast<std::size_t>(c) * draws + static_cast<std::size_t>(h) * half;
      double mean = 0;
      for (int i = 0; i < half; ++i) mean += x[i];
      mean /= half;
      double var = 0;
      for (int i = 0; i < half; ++i) var += (x[i] - mean) * (x[i] - mean);
      means[2 * c + h] = mean;
      vars[2 * c + h] = var / (half - 1);
    }
  }
  double grand = 0, w = 0;
  for (int i = 0; i < m; ++i) {
    grand += means[i];
    w += vars[i];
  }
  grand /= m;
  w /= m;
  double b = 0;
  for (int i = 0; i < m; ++i) b += (means[i] - grand) * (means[i] - grand);
  b *= static_cast<double>(half) / (m - 1);
  // A parameter that never moves is converged only if every chain sits on the same value.
  const double scale = std::max(std::abs(grand), 1.0) * 1e-12;
  if (w <= scale * scale) return b <= scale * scale ? 1.0 : std::numeric_limits<double>::infinity();
  const double var_plus = (half - 1.0) / half * w + b / half;
  return std::sqrt(var_plus / w);
}

ChangePointPosterior sample_posterior(std::span<const double> y, const CpModelSpec& spec, const SamplerOptions& opts) {
  check_observations(y, spec);
  if (spec.length < 6) throw Error("change-point model needs a series of at least 6 points");
  if (opts.chains < 2) throw Error("sampler needs at least 2 chains");
  if (opts.draws < 1000) throw Error("sampler needs at least 1000 draws per chain");
  if (opts.warmup < 0) throw Error("warmup must be non-negative");

  ChangePointPosterior post;
  post.chains = opts.chains;
  post.draws = opts.draws;
  post.seed = opts.seed;
  post.samples.reserve(static_cast<std::size_t>(opts.chains) * opts.draws);
  for (int c = 0; c < opts.chains; ++c) {
    Chain chain(y, spec, derive_seed(opts.seed, static_cast<std::uint64_t>(c)));
    chain.initialize();
    for (int it = 0; it < opts.warmup; ++it) chain.step(true, it);
    chain.reset_counters();
    for (int it = 0; it < opts.draws; ++it) {
      chain.step(false, it);
      const auto& s = chain.state();
      post.samples.push_back({s.mu[0], s.mu[1], s.mu[2], s.sigma, static_cast<double>(s.tau1),
                              static_cast<double>(s.tau2)});
    }
    post.chain_stats.push_back(chain.stats());
  }
  post.converged = true;
  for (std::size_t p = 0; p < 6; ++p) {
    post.rhat[p] = split_rhat(post.column(p), opts.chains, opts.draws);
    if (!(post.rhat[p] <= kMaxRhat)) post.converged = false;
  }
  return post;
}

std::pair<double, double> hdi(std::vector<double> samples, double mass) {
  if (!(mass > 0 && mass <= 1)) throw Error("HDI mass must lie in (0, 1]");
  if (samples.size() < 50) throw Error("HDI needs at least 50 samples, got " + std::to_string(samples.size()));
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  // The small slack keeps e.g. 0.94 * 100 from rounding up to 95.
  auto k = static_cast<std::size_t>(std::ceil(mass * static_cast<double>(n) - 1e-9));
  k = std::clamp<std::size_t>(k, 1, n);
  std::size_t best = 0;
  double width = samples[k - 1] - samples[0];
  for (std::size_t i = 1; i + k <= n; ++i) {
    const double w = samples[i + k - 1] - samples[i];
    if (w < width) {
      width = w;
      best = i;
    }
  }
  return {samples[best], samples[best + k - 1]};
}

Date tau_to_date(double tau, std::span<const Date> dates) {
  if (dates.empty()) throw Error("tau_to_date: empty date list");
  if (!(tau >= 0) || tau > static_cast<double>(dates.size())) throw Error("tau_to_date: tau outside [0, T]");
  auto i = static_cast<std::size_t>(std::floor(tau));
  return dates[std::min(i, dates.size() - 1)];
}

namespace {

Estimate estimate(const std::vector<double>& xs, double mass) {
  double mean = 0;
  for (double x : xs) mean += x;
  return {mean / static_cast<double>(xs.size()), hdi(xs, mass)};
}

double mode_of_integers(const std::vector<double>& xs) {
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  double best = sorted.front();
  std::size_t best_run = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    if (j - i > best_run) {
      best_run = j - i;
      best = sorted[i];
    }
    i = j;
  }
  return best;
}

}  // namespace

NidReport classify_nid(const ChangePointPosterior& post, std::span<const Date> dates, const std::string& source,
                       double threshold, double hdi_mass) {
  if (post.samples.empty()) throw Error("classify_nid: empty posterior");
  NidReport r;
  r.source = source;
  r.length = dates.size();
  r.hdi_mass = hdi_mass;
  r.seed = post.seed;
  r.threshold = threshold;
  r.rhat = post.rhat;
  r.converged = post.converged;

  auto tau1 = post.column(4), tau2 = post.column(5);
  r.tau1 = estimate(tau1, hdi_mass);
  r.tau2 = estimate(tau2, hdi_mass);
  r.tau1_mode = mode_of_integers(tau1);
  r.tau2_mode = mode_of_integers(tau2);
  for (int i = 0; i < 3; ++i) r.mu[i] = estimate(post.column(i), hdi_mass);
  r.sigma = estimate(post.column(3), hdi_mass);

  r.tau1_date = tau_to_date(r.tau1.mean, dates);
  r.tau2_date = tau_to_date(r.tau2.mean, dates);
  r.tau1_hdi_dates = {tau_to_date(r.tau1.hdi.first, dates), tau_to_date(r.tau1.hdi.second, dates)};
  r.tau2_hdi_dates = {tau_to_date(r.tau2.hdi.first, dates), tau_to_date(r.tau2.hdi.second, dates)};

  std::size_t below1 = 0, below3 = 0;
  for (const auto& s : post.samples) {
    below1 += s.mu2 < s.mu1;
    below3 += s.mu2 < s.mu3;
  }
  const double n = static_cast<double>(post.samples.size());
  r.p_mu2_below_mu1 = static_cast<double>(below1) / n;
  r.p_mu2_below_mu3 = static_cast<double>(below3) / n;
  r.nid_supported = r.p_mu2_below_mu1 > threshold && r.p_mu2_below_mu3 > threshold;
  return r;
}

nlohmann::ordered_json report_to_json(const NidReport& r) {
  using nlohmann::ordered_json;
  auto est = [](const Estimate& e) {
    ordered_json j;
    j["mean"] = e.mean;
    j["hdi"] = {e.hdi.first, e.hdi.second};
    return j;
  };
  auto tau = [&](const Estimate& e, Date d, const std::pair<Date, Date>& hd, double mode) {
    ordered_json j;
    j["date"] = d.iso();
    j["hdi"] = {hd.first.iso(), hd.second.iso()};
    j["index"] = e.mean;
    j["index_hdi"] = {e.hdi.first, e.hdi.second};
    j["mode"] = mode;
    return j;
  };
  ordered_json j;
  j["source"] = r.source;
  j["tau1"] = tau(r.tau1, r.tau1_date, r.tau1_hdi_dates, r.tau1_mode);
  j["tau2"] = tau(r.tau2, r.tau2_date, r.tau2_hdi_dates, r.tau2_mode);
  j["mu"] = ordered_json::array({est(r.mu[0]), est(r.mu[1]), est(r.mu[2])});
  j["sigma"] = est(r.sigma);
  j["nid_supported"] = r.nid_supported;
  ordered_json rhat;
  for (std::size_t p = 0; p < 6; ++p) rhat[kCpParamNames[p]] = r.rhat[p];
  j["rhat"] = rhat;
  j["converged"] = r.converged;
  if (!r.converged) j["warning"] = "not converged";
  j["seed"] = r.seed;
  j["hdi_mass"] = r.hdi_mass;
  j["length"] = r.length;
  ordered_json trace;
  trace["rule"] = "P(mu2 < mu1) > threshold and P(mu2 < mu3) > threshold";
  trace["threshold"] = r.threshold;
  trace["p_mu2_below_mu1"] = r.p_mu2_below_mu1;
  trace["p_mu2_below_mu3"] = r.p_mu2_below_mu3;
  trace["tau_dates_from"] = "posterior mean";
  trace["tau_prior"] = "uniform over the time-index range [0, T] with tau1 < tau2";
  j["decision"] = trace;
  return j;
}

}  // namespace nid
