// Apache License, Version 2.0, refer to LICENSE.txt

#include "nid/cli.hpp"

#include <cstdlib>
#include <ostream>
#include <set>
#include <sstream>

#include "nid/corpus.hpp"
#include "nid/error.hpp"
#include "nid/io.hpp"
#include "nid/nxr.hpp"
#include "nid/rng.hpp"
#include "nid/synth.hpp"

namespace nid::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <typename T>
T field(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error("invalid field '" + key + "': " + e.what());
  }
}

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw Error(what + ": expected a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw Error(what + ": unknown field '" + k + "'");
  }
}

void write_resolved(const RunConfig& cfg, const std::string& command, std::vector<fs::path>& written) {
  ordered_json j;
  j["command"] = command;
  j["config"] = config_to_json(cfg);
  auto p = cfg.output_dir / "resolved_config.json";
  io::write_file_atomic(p, j.dump(2) + "\n");
  written.push_back(p);
}

Date parse_date_arg(const std::string& s, const std::string& what) {
  auto d = Date::parse(s);
  if (!d) throw Error(what + ": unparseable date '" + s + "'");
  return *d;
}

}  // namespace

RunConfig default_config() {
  RunConfig c;
  const char* env = std::getenv(kOutputDirEnv);
  c.output_dir = env && *env ? fs::path(env) : fs::path("nid_out");
  return c;
}

RunConfig config_from_json(const json& j, RunConfig c) {
  require_keys(j,
               {"inputs", "representation", "stopwords", "lemmas", "min_count", "smoothing", "lda", "window",
                "day_aggregation", "pooled", "changepoint", "hdi_mass", "slope_alpha", "output_dir", "series",
                "tau1", "tau2", "periods_from"},
               "config");
  if (j.contains("inputs")) {
    c.inputs.clear();
    for (const auto& s : field<std::vector<std::string>>(j, "inputs")) c.inputs.emplace_back(s);
  }
  if (j.contains("representation")) c.representation = field<std::string>(j, "representation");
  if (j.contains("stopwords")) c.stopwords = field<std::string>(j, "stopwords");
  if (j.contains("lemmas")) c.lemmas = field<std::string>(j, "lemmas");
  if (j.contains("min_count")) c.min_count = field<int>(j, "min_count");
  if (j.contains("smoothing")) c.smoothing = field<double>(j, "smoothing");
  if (j.contains("lda")) {
    const auto& l = j["lda"];
    require_keys(l, {"topics", "alpha", "beta", "iterations", "burn", "samples"}, "config.lda");
    if (l.contains("topics")) c.lda_topics = field<int>(l, "topics");
    if (l.contains("alpha")) c.lda_alpha = field<double>(l, "alpha");
    if (l.contains("beta")) c.lda_beta = field<double>(l, "beta");
    if (l.contains("iterations")) c.lda_iterations = field<int>(l, "iterations");
    if (l.contains("burn")) c.lda_burn = field<int>(l, "burn");
    if (l.contains("samples")) c.lda_samples = field<int>(l, "samples");
  }
  if (j.contains("window")) c.window = field<int>(j, "window");
  if (j.contains("day_aggregation")) c.day_aggregation = field<bool>(j, "day_aggregation");
  if (j.contains("pooled")) c.pooled = field<bool>(j, "pooled");
  if (j.contains("changepoint")) {
    const auto& cp = j["changepoint"];
    require_keys(cp, {"chains", "draws", "warmup", "seed", "per_document", "threshold"}, "config.changepoint");
    if (cp.contains("chains")) c.chains = field<int>(cp, "chains");
    if (cp.contains("draws")) c.draws = field<int>(cp, "draws");
    if (cp.contains("warmup")) c.warmup = field<int>(cp, "warmup");
    if (cp.contains("seed")) c.seed = field<std::uint64_t>(cp, "seed");
    if (cp.contains("per_document")) c.per_document_series = field<bool>(cp, "per_document");
    if (cp.contains("threshold")) c.nid_threshold = field<double>(cp, "threshold");
  }
  if (j.contains("hdi_mass")) c.hdi_mass = field<double>(j, "hdi_mass");
  if (j.contains("slope_alpha")) c.slope_alpha = field<double>(j, "slope_alpha");
  if (j.contains("output_dir")) c.output_dir = field<std::string>(j, "output_dir");
  if (j.contains("series")) c.series = field<std::string>(j, "series");
  if (j.contains("tau1")) c.tau1 = field<std::string>(j, "tau1");
  if (j.contains("tau2")) c.tau2 = field<std::string>(j, "tau2");
  if (j.contains("periods_from")) c.periods_from = field<std::string>(j, "periods_from");
  return c;
}

ordered_json config_to_json(const RunConfig& c) {
  ordered_json j;
  j["inputs"] = ordered_json::array();
  for (const auto& p : c.inputs) j["inputs"].push_back(p.string());
  j["representation"] = c.representation;
  if (c.stopwords) j["stopwords"] = c.stopwords->string();
  if (c.lemmas) j["lemmas"] = c.lemmas->string();
  j["min_count"] = c.min_count;
  if (c.smoothing) j["smoothing"] = *c.smoothing;
  j["lda"] = {{"topics", c.lda_topics},         {"alpha", c.lda_alpha.value_or(5.0 / c.lda_topics)},
              {"beta", c.lda_beta},             {"iterations", c.lda_iterations},
              {"burn", c.lda_burn},             {"samples", c.lda_samples}};
  j["window"] = c.window;
  j["day_aggregation"] = c.day_aggregation;
  j["pooled"] = c.pooled;
  ordered_json cp;
  cp["chains"] = c.chains;
  cp["draws"] = c.draws;
  cp["warmup"] = c.warmup;
  cp["seed"] = c.seed;
  cp["per_document"] = c.per_document_series;
  cp["threshold"] = c.nid_threshold;
  j["changepoint"] = cp;
  j["hdi_mass"] = c.hdi_mass;
  j["slope_alpha"] = c.slope_alpha;
  j["output_dir"] = c.output_dir.string();
  if (c.series) j["series"] = c.series->string();
  if (c.tau1) j["tau1"] = *c.tau1;
  if (c.tau2) j["tau2"] = *c.tau2;
  if (c.periods_from) j["periods_from"] = c.periods_from->string();
  return j;
}

RunConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw Error("config file not found: " + path.string());
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw Error("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, default_config());
}

std::vector<DocDistribution> load_distributions(const RunConfig& cfg) {
  if (cfg.inputs.empty()) throw Error("no input files given");
  for (const auto& p : cfg.inputs) {
    if (!fs::exists(p)) throw Error("input file not found: " + p.string());
  }
  std::vector<DocDistribution> dists;
  if (cfg.representation == "import") {
    for (const auto& p : cfg.inputs) {
      auto part = import_distributions(p);
      dists.insert(dists.end(), part.begin(), part.end());
    }
  } else if (cfg.representation == "tf" || cfg.representation == "lda") {
    std::vector<Document> docs;
    for (const auto& p : cfg.inputs) {
      auto part = ingest(p);
      docs.insert(docs.end(), part.begin(), part.end());
    }
    StopwordSet stop;
    if (cfg.stopwords) stop = load_stopwords(*cfg.stopwords);
    NormalizeOpts opts;
    if (cfg.lemmas) opts.lemmatize = map_lemmatizer(load_lemma_map(*cfg.lemmas));
    std::vector<TokenizedDoc> toks;
    toks.reserve(docs.size());
    for (const auto& d : docs) toks.push_back(normalize(d, stop, opts));
    auto vocab = build_vocabulary(toks, cfg.min_count);
    if (cfg.representation == "tf") {
      const double s = cfg.smoothing.value_or(default_tf_smoothing(vocab));
      for (const auto& t : toks) dists.push_back(tf_distribution(t, vocab, s));
    } else {
      LdaParams params;
      params.topics = cfg.lda_topics;
      params.alpha = cfg.lda_alpha.value_or(-1);
      params.beta = cfg.lda_beta;
      params.iterations = cfg.lda_iterations;
      params.seed = cfg.seed;
      auto model = lda_fit(toks, vocab, params);
      for (const auto& t : toks) {
        dists.push_back(lda_infer(model, t, cfg.lda_burn, cfg.lda_samples, derive_seed(cfg.seed, t.id)).dist);
      }
    }
  } else {
    throw Error("unknown representation '" + cfg.representation + "' (expected tf, lda or import)");
  }
  std::set<std::string> ids;
  for (const auto& d : dists) {
    if (!ids.insert(d.id).second) throw Error("duplicate document id '" + d.id + "' across inputs");
  }
  std::stable_sort(dists.begin(), dists.end(), [](const DocDistribution& a, const DocDistribution& b) {
    return a.date != b.date ? a.date < b.date : a.id < b.id;
  });
  return dists;
}

std::vector<SourceStream> source_streams(const RunConfig& cfg, const std::vector<DocDistribution>& dists) {
  std::vector<SourceStream> out;
  if (cfg.pooled) {
    out.push_back({"pooled", dists});
  } else {
    for (auto& [source, stream] : split_by_source(dists)) out.push_back({source, std::move(stream)});
  }
  return out;
}

SignalSeries signals_for(const RunConfig& cfg, const SourceStream& stream) {
  SignalConfig sc{cfg.window};
  const auto& input = stream.dists;
  try {
    return cfg.day_aggregation ? compute_signals(aggregate_by_day(input), sc) : compute_signals(input, sc);
  } catch (const Error& e) {
    throw Error("source '" + stream.source + "': " + e.what());
  }
}

DailySeries detection_series(const RunConfig& cfg, const SignalSeries& signals) {
  if (!cfg.per_document_series) return daily_mean_novelty(signals);
  DailySeries out;
  for (const auto& p : signals.points) {
    if (!p.novelty) continue;
    out.dates.push_back(p.date);
    out.values.push_back(*p.novelty);
  }
  return out;
}

NidReport detect_series(const RunConfig& cfg, const std::string& source, const DailySeries& series) {
  if (series.values.size() < 6) {
    throw Error("source '" + source + "': detection needs at least 6 points, got " +
                std::to_string(series.values.size()));
  }
  SamplerOptions opts{cfg.chains, cfg.draws, cfg.warmup, derive_seed(cfg.seed, source)};
  auto post = sample_posterior(series.values, CpModelSpec::for_length(series.values.size()), opts);
  auto report = classify_nid(post, series.dates, source, cfg.nid_threshold, cfg.hdi_mass);
  report.seed = cfg.seed;
  return report;
}

std::string format_report_table(const std::vector<NidReport>& reports) {
  std::ostringstream ss;
  auto cell = [](Date d, const std::pair<Date, Date>& h) {
    return d.iso() + " [" + h.first.iso() + ", " + h.second.iso() + "]";
  };
  std::size_t width = 6;
  for (const auto& r : reports) width = std::max(width, r.source.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(w, s.size()), ' ');
    return s;
  };
  ss << pad("Source", width) << "  " << pad("NID Start [HDI]", 36) << "  " << pad("NID End [HDI]", 36) << "  NID\n";
  for (const auto& r : reports) {
    ss << pad(r.source, width) << "  " << pad(cell(r.tau1_date, r.tau1_hdi_dates), 36) << "  "
       << pad(cell(r.tau2_date, r.tau2_hdi_dates), 36) << "  " << (r.nid_supported ? "True" : "False")
       << (r.converged ? "" : "  (not converged)") << "\n";
  }
  return ss.str();
}

std::string file_stem_for(const std::string& source) {
  std::string out;
  for (char c : source) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "_" : out;
}

DailySeries read_series_csv(const fs::path& path) {
  if (!fs::exists(path)) throw Error("input file not found: " + path.string());
  DailySeries out;
  auto lines = io::read_lines(path);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = io::split_csv(lines[i]);
    const std::string where = path.string() + " line " + std::to_string(i + 1);
    if (f.size() != 2) throw Error(where + ": expected date,value");
    auto d = Date::parse(f[0]);
    if (!d) throw Error(where + ": unparseable date '" + f[0] + "'");
    double v;
    try {
      v = std::stod(f[1]);
    } catch (const std::exception&) {
      throw Error(where + ": bad number '" + f[1] + "'");
    }
    out.dates.push_back(*d);
    out.values.push_back(v);
  }
  return out;
}

std::vector<fs::path> cmd_ingest(const RunConfig& cfg, std::ostream& log) {
  std::vector<fs::path> written;
  auto dists = load_distributions(cfg);
  auto p = cfg.output_dir / "distributions.jsonl";
  io::write_file_atomic(p, emit_distributions(dists));
  written.push_back(p);
  std::map<std::string, std::size_t> per_source;
  for (const auto& d : dists) ++per_source[d.source];
  for (const auto& [s, n] : per_source) log << s << ": " << n << " documents\n";
  log << "dimension " << (dists.empty() ? 0 : dists.front().p.size()) << " -> " << p.string() << "\n";
  write_resolved(cfg, "ingest", written);
  return written;
}

std::vector<fs::path> cmd_signals(const RunConfig& cfg, std::ostream& log) {
  std::vector<fs::path> written;
  auto dists = load_distributions(cfg);
  for (const auto& stream : source_streams(cfg, dists)) {
    auto sig = signals_for(cfg, stream);
    auto p = cfg.output_dir / ("signals_" + file_stem_for(stream.source) + ".csv");
    io::write_file_atomic(p, emit_signals_csv(sig));
    written.push_back(p);
    log << stream.source << ": " << sig.points.size() << " rows -> " << p.string() << "\n";
  }
  write_resolved(cfg, "signals", written);
  return written;
}

std::vector<fs::path> cmd_detect(const RunConfig& cfg, std::ostream& log) {
  std::vector<fs::path> written;
  std::vector<NidReport> reports;
  if (cfg.series) {
    const std::string source = cfg.series->stem().string();
    reports.push_back(detect_series(cfg, source, read_series_csv(*cfg.series)));
  } else {
    auto dists = load_distributions(cfg);
    for (const auto& stream : source_streams(cfg, dists)) {
      auto sig = signals_for(cfg, stream);
      reports.push_back(detect_series(cfg, stream.source, detection_series(cfg, sig)));
    }
  }
  for (const auto& r : reports) {
    auto p = cfg.output_dir / ("detect_" + file_stem_for(r.source) + ".json");
    io::write_file_atomic(p, report_to_json(r).dump(2) + "\n");
    written.push_back(p);
  }
  auto table = format_report_table(reports);
  auto tp = cfg.output_dir / "detect_summary.txt";
  io::write_file_atomic(tp, table);
  written.push_back(tp);
  log << table;
  write_resolved(cfg, "detect", written);
  return written;
}

namespace {

std::pair<Date, Date> periods_for(const RunConfig& cfg, const std::string& source, const SignalSeries& sig) {
  if (cfg.tau1 || cfg.tau2) {
    if (!cfg.tau1 || !cfg.tau2) throw Error("explicit periods need both tau1 and tau2");
    return {parse_date_arg(*cfg.tau1, "tau1"), parse_date_arg(*cfg.tau2, "tau2")};
  }
  if (cfg.periods_from) {
    auto p = *cfg.periods_from / ("detect_" + file_stem_for(source) + ".json");
    if (!fs::exists(p)) throw Error("no detect report for source '" + source + "' at " + p.string());
    auto j = json::parse(io::read_file(p));
    return {parse_date_arg(j.at("tau1").at("date").get<std::string>(), "tau1"),
            parse_date_arg(j.at("tau2").at("date").get<std::string>(), "tau2")};
  }
  auto r = detect_series(cfg, source, detection_series(cfg, sig));
  return {r.tau1_date, r.tau2_date};
}

}  // namespace

std::vector<fs::path> cmd_slopes(const RunConfig& cfg, std::ostream& log) {
  std::vector<fs::path> written;
  if (cfg.tau1.has_value() != cfg.tau2.has_value()) throw Error("explicit periods need both tau1 and tau2");
  auto dists = load_distributions(cfg);
  ordered_json out = ordered_json::array();
  for (const auto& stream : source_streams(cfg, dists)) {
    try {
      auto sig = signals_for(cfg, stream);
      auto [tau1, tau2] = periods_for(cfg, stream.source, sig);
      for (const auto& f : period_slopes(sig, tau1, tau2, cfg.slope_alpha)) {
        ordered_json e;
        e["source"] = stream.source;
        e["period"] = period_name(f.period);
        e["beta1"] = f.beta1;
        e["ci"] = {f.ci_low, f.ci_high};
        e["n"] = f.n;
        e["beta0"] = f.beta0;
        e["start"] = f.first_date ? f.first_date->iso() : "";
        e["end"] = f.last_date ? f.last_date->iso() : "";
        out.push_back(e);
        log << stream.source << " " << period_name(f.period) << ": beta1 " << f.beta1 << " [" << f.ci_low << ", "
            << f.ci_high << "] n=" << f.n << "\n";
      }
    } catch (const Error& e) {
      out.push_back({{"source", stream.source}, {"error", e.what()}});
      log << stream.source << ": error: " << e.what() << "\n";
    }
  }
  auto p = cfg.output_dir / "slopes.json";
  io::write_file_atomic(p, out.dump(2) + "\n");
  written.push_back(p);
  write_resolved(cfg, "slopes", written);
  return written;
}

std::vector<fs::path> cmd_simulate(const fs::path& spec_file, const fs::path& output_dir, std::ostream& log) {
  if (!fs::exists(spec_file)) throw Error("spec file not found: " + spec_file.string());
  json j;
  try {
    j = json::parse(io::read_file(spec_file));
  } catch (const json::parse_error& e) {
    throw Error("spec " + spec_file.string() + ": " + e.what());
  }
  if (!j.is_object()) throw Error("spec: expected a JSON object");
  if (!j.contains("seed")) throw Error("invalid field 'seed': required for reproducibility");
  const auto kind = field<std::string>(j, "kind");
  std::vector<fs::path> written;
  auto start = [&](Date fallback) {
    return j.contains("start_date") ? parse_date_arg(field<std::string>(j, "start_date"), "invalid field 'start_date'")
                                    : fallback;
  };

  if (kind == "series") {
    require_keys(j, {"kind", "seed", "length", "tau", "mu", "sigma", "start_date"}, "spec");
    SynthSeriesSpec s;
    s.seed = field<std::uint64_t>(j, "seed");
    if (j.contains("length")) s.length = field<std::size_t>(j, "length");
    if (j.contains("tau")) s.tau = field<std::array<std::size_t, 2>>(j, "tau");
    if (j.contains("mu")) s.mu = field<std::array<double, 3>>(j, "mu");
    if (j.contains("sigma")) s.sigma = field<double>(j, "sigma");
    s.start = start(s.start);
    try {
      s.validate();
    } catch (const Error& e) {
      throw Error(std::string("invalid field ") + e.what());
    }
    auto series = gen_series(s);
    std::string csv = "date,value\n";
    for (std::size_t t = 0; t < series.values.size(); ++t) {
      csv += series.dates[t].iso() + "," + io::format_double(series.values[t]) + "\n";
    }
    auto p = output_dir / "series.csv";
    io::write_file_atomic(p, csv);
    auto tp = output_dir / "series_truth.json";
    auto truth = truth_to_json(series.truth);
    io::write_file_atomic(tp, truth.dump(2) + "\n");
    written = {p, tp};
    log << "series: T=" << s.length << " tau=(" << s.tau[0] << ", " << s.tau[1] << ") dates " << truth["tau_dates"][0]
        << ", " << truth["tau_dates"][1] << " mu=(" << s.mu[0] << ", " << s.mu[1] << ", " << s.mu[2]
        << ") sigma=" << s.sigma << "\n";
  } else if (kind == "corpus") {
    require_keys(j,
                 {"kind", "seed", "days", "docs_per_day", "vocab_size", "event_window", "event_concentration",
                  "start_date", "source", "topics", "tokens_per_doc", "day_alpha", "topic_word_alpha"},
                 "spec");
    SynthCorpusSpec s;
    s.seed = field<std::uint64_t>(j, "seed");
    if (j.contains("days")) s.days = field<std::size_t>(j, "days");
    if (j.contains("docs_per_day")) s.docs_per_day = field<std::size_t>(j, "docs_per_day");
    if (j.contains("vocab_size")) s.vocab_size = field<std::size_t>(j, "vocab_size");
    if (j.contains("event_window")) {
      auto w = field<std::array<std::size_t, 2>>(j, "event_window");
      s.event_start = w[0];
      s.event_end = w[1];
    }
    if (j.contains("event_concentration")) s.event_concentration = field<double>(j, "event_concentration");
    if (j.contains("source")) s.source = field<std::string>(j, "source");
    if (j.contains("topics")) s.topics = field<std::size_t>(j, "topics");
    if (j.contains("tokens_per_doc")) s.tokens_per_doc = field<std::size_t>(j, "tokens_per_doc");
    if (j.contains("day_alpha")) s.day_alpha = field<double>(j, "day_alpha");
    if (j.contains("topic_word_alpha")) s.topic_word_alpha = field<double>(j, "topic_word_alpha");
    s.start = start(s.start);
    try {
      s.validate();
    } catch (const Error& e) {
      throw Error(std::string("invalid field ") + e.what());
    }
    auto corpus = gen_corpus(s);
    auto p = output_dir / "corpus.jsonl";
    io::write_file_atomic(p, emit_corpus(corpus.docs));
    auto tp = output_dir / "corpus_truth.json";
    auto truth = truth_to_json(corpus.truth);
    io::write_file_atomic(tp, truth.dump(2) + "\n");
    written = {p, tp};
    log << "corpus: " << corpus.docs.size() << " documents over " << s.days << " days, event window ["
        << truth["event_window_dates"][0] << ", " << truth["event_window_dates"][1] << ") concentration "
        << s.event_concentration << "\n";
  } else {
    throw Error("invalid field 'kind': expected series or corpus");
  }
  return written;
}

}  // namespace nid::cli
