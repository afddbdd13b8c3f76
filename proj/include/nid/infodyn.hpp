// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nid/represent.hpp"

namespace nid {

// Kullback-Leibler divergence in bits. Terms with p_i = 0 contribute 0;
// q must be strictly positive and of the same dimension.
double kld(std::span<const double> p, std::span<const double> q);

// Jensen-Shannon divergence in bits, against the midpoint M = (p + q) / 2.
// Symmetric to the last bit and bounded by [0, 1].
double jsd(std::span<const double> p, std::span<const double> q);

struct SignalConfig {
  int window = 7;  // in documents (or days, for day-aggregated input)
};

// Point-wise signals. All three return nullopt when the window does not fit.
std::optional<double> novelty(const std::vector<DocDistribution>& series, std::size_t j, const SignalConfig& cfg);
std::optional<double> transience(const std::vector<DocDistribution>& series, std::size_t j, const SignalConfig& cfg);
std::optional<double> resonance(const std::vector<DocDistribution>& series, std::size_t j, const SignalConfig& cfg);

struct SignalPoint {
  std::string id;
  Date date;
  std::string source;
  std::optional<double> novelty;
  std::optional<double> transience;
  std::optional<double> resonance;

  bool defined() const { return novelty.has_value(); }
};

struct SignalSeries {
  std::vector<SignalPoint> points;
  SignalConfig config;
  // Inclusive index range where every signal is defined: [w, n - w - 1].
  std::size_t valid_first = 0;
  std::size_t valid_last = 0;
};

// One point per input distribution; signals are set exactly on
// [w, n - w - 1] and left undefined elsewhere. The input must be sorted by
// (date, id) and longer than 2w.
SignalSeries compute_signals(const std::vector<DocDistribution>& series, const SignalConfig& cfg);

// Streams keyed by source, each keeping the input order.
std::map<std::string, std::vector<DocDistribution>> split_by_source(const std::vector<DocDistribution>& dists);

// One mean distribution per calendar day (id = ISO date); input must be sorted.
std::vector<DocDistribution> aggregate_by_day(const std::vector<DocDistribution>& dists);

struct DailySeries {
  std::vector<Date> dates;
  std::vector<double> values;
};

// Mean novelty per day over days whose documents all carry defined signals.
DailySeries daily_mean_novelty(const SignalSeries& series);

// CSV id,date,source,novelty,transience,resonance; empty fields for undefined values.
std::string emit_signals_csv(const SignalSeries& series);
SignalSeries parse_signals_csv(const std::string& text);

}  // namespace nid
