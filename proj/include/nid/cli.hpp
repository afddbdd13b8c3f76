// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nid/changepoint.hpp"
#include "nid/infodyn.hpp"
#include "nid/represent.hpp"

namespace nid::cli {

// Every knob of a pipeline run. A run writes the resolved form next to its
// outputs (resolved_config.json), which is enough to repeat any stage.
struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  std::string representation = "tf";  // tf | lda | import
  std::optional<std::filesystem::path> stopwords;
  std::optional<std::filesystem::path> lemmas;
  int min_count = 1;
  std::optional<double> smoothing;  // default 0.5 / V

  int lda_topics = 20;
  std::optional<double> lda_alpha;  // default 5 / topics
  double lda_beta = 0.01;
  int lda_iterations = 500;
  int lda_burn = 50;
  int lda_samples = 50;

  int window = 7;
  bool day_aggregation = false;
  bool pooled = false;

  int chains = 4;
  int draws = 1000;
  int warmup = 1000;
  std::uint64_t seed = 1;
  bool per_document_series = false;
  double nid_threshold = 0.97;
  double hdi_mass = 0.94;
  double slope_alpha = 0.05;

  std::filesystem::path output_dir;

  // detect: precomputed CSV series (date,value) instead of a corpus
  std::optional<std::filesystem::path> series;
  // slopes: explicit period boundaries, or a directory of detect reports
  std::optional<std::string> tau1;
  std::optional<std::string> tau2;
  std::optional<std::filesystem::path> periods_from;
};

inline constexpr const char* kOutputDirEnv = "NID_OUTPUT_DIR";

// Defaults, with output_dir taken from $NID_OUTPUT_DIR when set.
RunConfig default_config();
// Applies the keys present in j on top of base; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base);
nlohmann::ordered_json config_to_json(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& path);

// Representations of every input document, sorted by (date, id).
std::vector<DocDistribution> load_distributions(const RunConfig& cfg);

struct SourceStream {
  std::string source;
  std::vector<DocDistribution> dists;
};
std::vector<SourceStream> source_streams(const RunConfig& cfg, const std::vector<DocDistribution>& dists);

SignalSeries signals_for(const RunConfig& cfg, const SourceStream& stream);

// Series handed to the change-point model: daily mean novelty over complete
// days, or per-document novelty when per_document_series is set.
DailySeries detection_series(const RunConfig& cfg, const SignalSeries& signals);

NidReport detect_series(const RunConfig& cfg, const std::string& source, const DailySeries& series);

// Summary table: Source, NID Start [HDI], NID End [HDI], NID.
std::string format_report_table(const std::vector<NidReport>& reports);

std::string file_stem_for(const std::string& source);

// Subcommands. Each writes under cfg.output_dir and returns the paths written.
std::vector<std::filesystem::path> cmd_ingest(const RunConfig& cfg, std::ostream& log);
std::vector<std::filesystem::path> cmd_signals(const RunConfig& cfg, std::ostream& log);
std::vector<std::filesystem::path> cmd_detect(const RunConfig& cfg, std::ostream& log);
std::vector<std::filesystem::path> cmd_slopes(const RunConfig& cfg, std::ostream& log);
std::vector<std::filesystem::path> cmd_simulate(const std::filesystem::path& spec_file,
                                                const std::filesystem::path& output_dir, std::ostream& log);

// Reads a two-column CSV (date,value) with a header line.
DailySeries read_series_csv(const std::filesystem::path& path);

}  // namespace nid::cli
