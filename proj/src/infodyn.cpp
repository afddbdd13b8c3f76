// Apache License, Version 2.0, refer to LICENSE.txt

#include "nid/infodyn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nid/error.hpp"
#include "nid/io.hpp"

namespace nid {

namespace {

// Sum over p_i > 0 of p_i log2(p_i / q_i); q_i is assumed positive there.
double kl_terms(std::span<const double> p, std::span<const double> q) {
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) d += p[i] * std::log2(p[i] / q[i]);
  }
  return d;
}

void check_sorted(const std::vector<DocDistribution>& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    const auto& a = s[i - 1];
    const auto& b = s[i];
    if (b.date < a.date || (b.date == a.date && b.id < a.id)) {
      throw Error("series is not sorted by (date, id) at '" + b.id + "'");
    }
  }
}

std::optional<double> parse_optional(const std::string& f) {
  if (f.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    double v = std::stod(f, &used);
    if (used == f.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error("signals CSV: bad number '" + f + "'");
}

}  // namespace

double kld(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error("kld: dimension mismatch");
  for (double v : q) {
    if (!(v > 0)) throw Error("kld: q has a zero component");
  }
  return std::max(0.0, kl_terms(p, q));
}

double jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error("jsd: dimension mismatch");
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  const double d = 0.5 * kl_terms(p, m) + 0.5 * kl_terms(q, m);
  return std::clamp(d, 0.0, 1.0);
}

std::optional<double> novelty(const std::vector<DocDistribution>& series, std::size_t j, const SignalConfig& cfg) {
  const auto w = static_cast<std::size_t>(cfg.window);
  if (cfg.window < 1) throw Error("window must be >= 1");
  if (j < w || j >= series.size()) return std::nullopt;
  double sum = 0;
  for (std::size_t d = 1; d <= w; ++d) sum += jsd(series[j].p, series[j - d].p);
  return sum / static_cast<double>(w);
}

std::optional<double> transience(const std::vector<DocDistribution>& series, std::size_t j, const SignalConfig& cfg) {
  const auto w = static_cast<std::size_t>(cfg.window);
  if (cfg.window < 1) throw Error("window must be >= 1");
  if (j + w >= series.size()) return std::nullopt;
  double sum = 0;
  for (std::size_t d = 1; d <= w; ++d) sum += jsd(series[j].p, series[j + d].p);
  return sum / static_cast<double>(w);
}

std::optional<double> resonance(const std::vector<DocDistribution>& series, std::size_t j, const SignalConfig& cfg) {
  auto n = novelty(series, j, cfg);
  auto t = transience(series, j, cfg);
  if (!n || !t) return std::nullopt;
  return *n - *t;
}

SignalSeries compute_signals(const std::vector<DocDistribution>& series, const SignalConfig& cfg) {
  if (cfg.window < 1) throw Error("window must be >= 1");
  const auto w = static_cast<std::size_t>(cfg.window);
  const std::size_t n = series.size();
  if (n <= 2 * w) {
    throw Error("series too short for window: " + std::to_string(n) + " documents, need at least " +
                std::to_string(2 * w + 1));
  }
  check_sorted(series);
  for (const auto& d : series) {
    if (d.p.size() != series.front().p.size()) throw Error("distribution dimension differs at '" + d.id + "'");
  }

  SignalSeries out;
  out.config = cfg;
  out.valid_first = w;
  out.valid_last = n - w - 1;
  out.points.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    SignalPoint pt{series[j].id, series[j].date, series[j].source, {}, {}, {}};
    if (j >= out.valid_first && j <= out.valid_last) {
      pt.novelty = novelty(series, j, cfg);
      pt.transience = transience(series, j, cfg);
      pt.resonance = *pt.novelty - *pt.transience;
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

std::map<std::string, std::vector<DocDistribution>> split_by_source(const std::vector<DocDistribution>& dists) {
  std::map<std::string, std::vector<DocDistribution>> out;
  for (const auto& d : dists) out[d.source].push_back(d);
  return out;
}

std::vector<DocDistribution> aggregate_by_day(const std::vector<DocDistribution>& dists) {
  check_sorted(dists);
  std::vector<DocDistribution> out;
  std::size_t i = 0;
  while (i < dists.size()) {
    std::size_t j = i;
    std::vector<double> mean(dists[i].p.size(), 0.0);
    bool mixed = false;
    while (j < dists.size() && dists[j].date == dists[i].date) {
      if (dists[j].p.size() != mean.size()) throw Error("distribution dimension differs at '" + dists[j].id + "'");
      for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += dists[j].p[k];
      mixed |= dists[j].source != dists[i].source;
      ++j;
    }
    const double count = static_cast<double>(j - i);
    for (auto& v : mean) v /= count;
    out.push_back({dists[i].date.iso(), dists[i].date, mixed ? std::string("pooled") : dists[i].source, std::move(mean)});
    i = j;
  }
  return out;
}

DailySeries daily_mean_novelty(const SignalSeries& series) {
  DailySeries out;
  const auto& pts = series.points;
  std::size_t i = 0;
  while (i < pts.size()) {
    std::size_t j = i;
    double sum = 0;
    bool complete = true;
    while (j < pts.size() && pts[j].date == pts[i].date) {
      if (pts[j].novelty) {
        sum += *pts[j].novelty;
      } else {
        complete = false;
      }
      ++j;
    }
    if (complete) {
      out.dates.push_back(pts[i].date);
      out.values.push_back(sum / static_cast<double>(j - i));
    }
    i = j;
  }
  return out;
}

std::string emit_signals_csv(const SignalSeries& series) {
  std::string out = "id,date,source,novelty,transience,resonance\n";
  auto field = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); };
  for (const auto& p : series.points) {
    if (p.id.find_first_of(",\n") != std::string::npos || p.source.find_first_of(",\n") != std::string::npos) {
      throw Error("signals CSV: id or source contains a comma or newline: '" + p.id + "'");
    }
    out += p.id + ',' + p.date.iso() + ',' + p.source + ',' + field(p.novelty) + ',' + field(p.transience) + ',' +
           field(p.resonance) + '\n';
  }
  return out;
}

SignalSeries parse_signals_csv(const std::string& text) {
  SignalSeries out;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      if (line != "id,date,source,novelty,transience,resonance") throw Error("signals CSV: unexpected header");
      header = false;
      continue;
    }
    auto f = io::split_csv(line);
    if (f.size() != 6) throw Error("signals CSV line " + std::to_string(line_no) + ": expected 6 fields");
    auto date = Date::parse(f[1]);
    if (!date) throw Error("signals CSV line " + std::to_string(line_no) + ": unparseable date");
    out.points.push_back({f[0], *date, f[2], parse_optional(f[3]), parse_optional(f[4]), parse_optional(f[5])});
  }
  bool any = false;
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (!out.points[i].defined()) continue;
    if (!any) out.valid_first = i;
    out.valid_last = i;
    any = true;
  }
  if (any) out.config.window = static_cast<int>(out.valid_first);
  return out;
}

}  // namespace nid
