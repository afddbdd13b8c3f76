// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nid/corpus.hpp"

namespace nid {

// Piecewise-constant mean with Gaussian noise; segments [0, t1), [t1, t2), [t2, T).
struct SynthSeriesSpec {
  std::size_t length = 210;
  std::array<std::size_t, 2> tau{98, 133};
  std::array<double, 3> mu{0.27, 0.15, 0.26};
  double sigma = 0.02;
  std::uint64_t seed = 0;
  Date start = *Date::parse("2019-12-01");

  void validate() const;
};

struct SeriesTruth {
  std::size_t length = 0;
  std::array<std::size_t, 2> tau{};
  std::array<Date, 2> tau_dates{};
  std::array<double, 3> mu{};
  double sigma = 0;
  std::uint64_t seed = 0;

  bool operator==(const SeriesTruth&) const = default;
};

struct SynthSeries {
  std::vector<double> values;
  std::vector<Date> dates;
  SeriesTruth truth;
};

SynthSeries gen_series(const SynthSeriesSpec& spec);

nlohmann::ordered_json truth_to_json(const SeriesTruth& t);
SeriesTruth series_truth_from_json(const nlohmann::json& j);

// Documents mix latent topics. Each day draws its own topic mixture; inside
// the event window [event_start, event_end) the mixture is pulled toward one
// fixed event mixture with weight 1 - 1 / event_concentration.
struct SynthCorpusSpec {
  std::size_t days = 210;
  std::size_t docs_per_day = 10;
  std::size_t vocab_size = 300;
  std::size_t event_start = 98;
  std::size_t event_end = 133;
  double event_concentration = 50;
  std::uint64_t seed = 0;
  Date start = *Date::parse("2019-12-01");
  std::string source = "synthetic";
  std::size_t topics = 12;
  std::size_t tokens_per_doc = 150;
  double day_alpha = 0.3;         // Dirichlet concentration of day topic mixtures
  double topic_word_alpha = 0.05;  // Dirichlet concentration of topic-word distributions

  void validate() const;
};

struct CorpusTruth {
  std::size_t event_start = 0, event_end = 0;
  Date event_start_date, event_end_date;
  double event_concentration = 0;
  std::uint64_t seed = 0;
};

struct SynthCorpus {
  std::vector<Document> docs;
  CorpusTruth truth;
};

SynthCorpus gen_corpus(const SynthCorpusSpec& spec);

nlohmann::ordered_json truth_to_json(const CorpusTruth& t);

}  // namespace nid
