// Apache License, Version 2.0, refer to LICENSE.txt

#include "nid/synth.hpp"

#include <algorithm>
#include <cstdio>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "nid/error.hpp"
#include "nid/rng.hpp"

namespace nid {

void SynthSeriesSpec::validate() const {
  if (!(0 < tau[0] && tau[0] < tau[1] && tau[1] < length)) throw Error("tau: need 0 < t1 < t2 < T");
  if (!(sigma > 0)) throw Error("sigma: must be positive");
}

SynthSeries gen_series(const SynthSeriesSpec& spec) {
  spec.validate();
  SynthSeries out;
  Rng rng(spec.seed);
  boost::random::normal_distribution<double> noise(0.0, spec.sigma);
  for (std::size_t t = 0; t < spec.length; ++t) {
    const double mean = t < spec.tau[0] ? spec.mu[0] : t < spec.tau[1] ? spec.mu[1] : spec.mu[2];
    out.values.push_back(mean + noise(rng));
    out.dates.push_back(spec.start + static_cast<long>(t));
  }
  out.truth = {spec.length, spec.tau, {out.dates[spec.tau[0]], out.dates[spec.tau[1]]}, spec.mu, spec.sigma, spec.seed};
  return out;
}

nlohmann::ordered_json truth_to_json(const SeriesTruth& t) {
  nlohmann::ordered_json j;
  j["length"] = t.length;
  j["tau_days"] = {t.tau[0], t.tau[1]};
  j["tau_dates"] = {t.tau_dates[0].iso(), t.tau_dates[1].iso()};
  j["mu"] = {t.mu[0], t.mu[1], t.mu[2]};
  j["sigma"] = t.sigma;
  j["seed"] = t.seed;
  return j;
}

SeriesTruth series_truth_from_json(const nlohmann::json& j) {
  SeriesTruth t;
  try {
    t.length = j.at("length").get<std::size_t>();
    t.tau = j.at("tau_days").get<std::array<std::size_t, 2>>();
    for (int i = 0; i < 2; ++i) {
      auto d = Date::parse(j.at("tau_dates").at(i).get<std::string>());
      if (!d) throw Error("truth: unparseable tau date");
      t.tau_dates[i] = *d;
    }
    t.mu = j.at("mu").get<std::array<double, 3>>();
    t.sigma = j.at("sigma").get<double>();
    t.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("truth record: ") + e.what());
  }
  return t;
}

void SynthCorpusSpec::validate() const {
  if (days < 1) throw Error("days: must be >= 1");
  if (docs_per_day < 1) throw Error("docs_per_day: must be >= 1");
  if (vocab_size < 2) throw Error("vocab_size: must be >= 2");
  if (!(event_start < event_end && event_end <= days)) throw Error("event_window: need start < end <= days");
  if (!(event_concentration >= 1)) throw Error("event_concentration: must be >= 1");
  if (topics < 2) throw Error("topics: must be >= 2");
  if (tokens_per_doc < 1) throw Error("tokens_per_doc: must be >= 1");
  if (!(day_alpha > 0)) throw Error("day_alpha: must be positive");
  if (!(topic_word_alpha > 0)) throw Error("topic_word_alpha: must be positive");
}

namespace {

std::vector<double> dirichlet(std::size_t k, double alpha, Rng& rng) {
  boost::random::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> out(k);
  double sum = 0;
  for (auto& v : out) {
    v = gamma(rng);
    sum += v;
  }
  if (!(sum > 0)) {
    // Every gamma draw underflowed; fall back to uniform.
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(k));
    return out;
  }
  for (auto& v : out) v /= sum;
  return out;
}

std::string word(std::size_t i, std::size_t vocab) {
  const int width = static_cast<int>(std::to_string(vocab - 1).size());
  char buf[32];
  std::snprintf(buf, sizeof buf, "w%0*zu", width, i);
  return buf;
}

}  // namespace

SynthCorpus gen_corpus(const SynthCorpusSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t v = spec.vocab_size, k = spec.topics;

  std::vector<std::vector<double>> topic_word;
  for (std::size_t t = 0; t < k; ++t) topic_word.push_back(dirichlet(v, spec.topic_word_alpha, rng));
  const auto event_mix = dirichlet(k, spec.day_alpha, rng);
  const double pull = 1.0 - 1.0 / spec.event_concentration;

  std::vector<std::string> words;
  for (std::size_t i = 0; i < v; ++i) words.push_back(word(i, v));

  SynthCorpus out;
  boost::random::uniform_01<double> uniform;
  std::vector<double> cdf(v);
  for (std::size_t day = 0; day < spec.days; ++day) {
    auto mix = dirichlet(k, spec.day_alpha, rng);
    if (day >= spec.event_start && day < spec.event_end) {
      for (std::size_t t = 0; t < k; ++t) mix[t] = (1.0 - pull) * mix[t] + pull * event_mix[t];
    }
    double acc = 0;
    for (std::size_t i = 0; i < v; ++i) {
      double p = 0;
      for (std::size_t t = 0; t < k; ++t) p += mix[t] * topic_word[t][i];
      acc += p;
      cdf[i] = acc;
    }
    const Date date = spec.start + static_cast<long>(day);
    for (std::size_t d = 0; d < spec.docs_per_day; ++d) {
      std::string text;
      for (std::size_t n = 0; n < spec.tokens_per_doc; ++n) {
        const double u = uniform(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), v - 1);
        if (n) text += ' ';
        text += words[i];
      }
      char suffix[32];
      std::snprintf(suffix, sizeof suffix, "-%05zu-%03zu", day, d);
      out.docs.push_back({spec.source + suffix, date, spec.source, std::move(text)});
    }
  }
  out.truth = {spec.event_start, spec.event_end, spec.start + static_cast<long>(spec.event_start),
               spec.start + static_cast<long>(spec.event_end), spec.event_concentration, spec.seed};
  return out;
}

nlohmann::ordered_json truth_to_json(const CorpusTruth& t) {
  nlohmann::ordered_json j;
  j["event_window"] = {t.event_start, t.event_end};
  j["event_window_dates"] = {t.event_start_date.iso(), t.event_end_date.iso()};
  j["event_concentration"] = t.event_concentration;
  j["seed"] = t.seed;
  return j;
}

}  // namespace nid
