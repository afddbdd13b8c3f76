// Apache License, Version 2.0, refer to LICENSE.txt

// nid: information-dynamics signals and change-point detection over dated corpora.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nid/cli.hpp"
#include "nid/error.hpp"

namespace {

// Flag values; a flag overrides the config file only when given.
struct Overrides {
  std::optional<std::string> config;
  std::vector<std::string> inputs;
  std::optional<std::string> representation, stopwords, lemmas, out, series, tau1, tau2, periods_from;
  std::optional<int> window, chains, draws, warmup, min_count, topics;
  std::optional<std::uint64_t> seed;
  std::optional<double> hdi_mass, alpha, threshold;
  bool day_aggregation = false, pooled = false, per_document = false;
};

void add_pipeline_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON run configuration");
  cmd->add_option("-i,--input", o.inputs, "Corpus JSONL (or distributions with --representation import)");
  cmd->add_option("-r,--representation", o.representation, "tf | lda | import");
  cmd->add_option("--stopwords", o.stopwords, "Stopword file, one token per line");
  cmd->add_option("--lemmas", o.lemmas, "Lemma map TSV surface<TAB>lemma");
  cmd->add_option("--min-count", o.min_count, "Minimum corpus frequency for vocabulary terms");
  cmd->add_option("--topics", o.topics, "LDA topic count");
  cmd->add_option("-w,--window", o.window, "Signal window in documents");
  cmd->add_flag("--day-aggregation", o.day_aggregation, "Average distributions per day before computing signals");
  cmd->add_flag("--pooled", o.pooled, "Compute signals over all sources as one stream");
  cmd->add_option("-o,--out", o.out, "Output directory (default $NID_OUTPUT_DIR or ./nid_out)");
}

void add_detect_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--chains", o.chains, "MCMC chains");
  cmd->add_option("--draws", o.draws, "Retained draws per chain");
  cmd->add_option("--warmup", o.warmup, "Warmup iterations per chain");
  cmd->add_option("--seed", o.seed, "Sampler seed");
  cmd->add_option("--hdi-mass", o.hdi_mass, "HDI mass");
  cmd->add_option("--threshold", o.threshold, "Posterior ordering probability required for NID");
  cmd->add_flag("--per-document", o.per_document, "Feed per-document novelty instead of daily means");
}

nid::cli::RunConfig resolve(const Overrides& o) {
  auto c = o.config ? nid::cli::load_config(*o.config) : nid::cli::default_config();
  if (!o.inputs.empty()) c.inputs.assign(o.inputs.begin(), o.inputs.end());
  if (o.representation) c.representation = *o.representation;
  if (o.stopwords) c.stopwords = *o.stopwords;
  if (o.lemmas) c.lemmas = *o.lemmas;
  if (o.min_count) c.min_count = *o.min_count;
  if (o.topics) c.lda_topics = *o.topics;
  if (o.window) c.window = *o.window;
  if (o.day_aggregation) c.day_aggregation = true;
  if (o.pooled) c.pooled = true;
  if (o.out) c.output_dir = *o.out;
  if (o.chains) c.chains = *o.chains;
  if (o.draws) c.draws = *o.draws;
  if (o.warmup) c.warmup = *o.warmup;
  if (o.seed) c.seed = *o.seed;
  if (o.hdi_mass) c.hdi_mass = *o.hdi_mass;
  if (o.threshold) c.nid_threshold = *o.threshold;
  if (o.per_document) c.per_document_series = true;
  if (o.alpha) c.slope_alpha = *o.alpha;
  if (o.series) c.series = *o.series;
  if (o.tau1) c.tau1 = *o.tau1;
  if (o.tau2) c.tau2 = *o.tau2;
  if (o.periods_from) c.periods_from = *o.periods_from;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"News information decoupling: novelty/resonance signals and change-point detection"};
  app.require_subcommand(1);
  Overrides o;

  auto* ingest = app.add_subcommand("ingest", "Normalize a corpus and write document distributions");
  add_pipeline_options(ingest, o);

  auto* signals = app.add_subcommand("signals", "Write novelty/transience/resonance CSV per source");
  add_pipeline_options(signals, o);

  auto* detect = app.add_subcommand("detect", "Two-change-point detection on novelty, one report per source");
  add_pipeline_options(detect, o);
  add_detect_options(detect, o);
  detect->add_option("--series", o.series, "Detect on a date,value CSV instead of a corpus");

  auto* slopes = app.add_subcommand("slopes", "Resonance-on-novelty slopes before, during and after the event");
  add_pipeline_options(slopes, o);
  add_detect_options(slopes, o);
  slopes->add_option("--tau1", o.tau1, "Explicit start of the event period (YYYY-MM-DD)");
  slopes->add_option("--tau2", o.tau2, "Explicit end of the event period (YYYY-MM-DD)");
  slopes->add_option("--periods-from", o.periods_from, "Directory holding detect reports");
  slopes->add_option("--alpha", o.alpha, "1 - confidence level of the slope intervals");

  std::string spec_file;
  std::optional<std::string> sim_out;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic series or corpus with a truth sidecar");
  simulate->add_option("spec", spec_file, "JSON spec (kind: series | corpus)")->required();
  simulate->add_option("-o,--out", sim_out, "Output directory (default $NID_OUTPUT_DIR or ./nid_out)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      auto dir = sim_out ? std::filesystem::path(*sim_out) : nid::cli::default_config().output_dir;
      nid::cli::cmd_simulate(spec_file, dir, std::cout);
      return 0;
    }
    auto cfg = resolve(o);
    if (*ingest) nid::cli::cmd_ingest(cfg, std::cout);
    if (*signals) nid::cli::cmd_signals(cfg, std::cout);
    if (*detect) nid::cli::cmd_detect(cfg, std::cout);
    if (*slopes) nid::cli::cmd_slopes(cfg, std::cout);
  } catch (const nid::Error& e) {
    std::cerr << "nid: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "nid: error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
