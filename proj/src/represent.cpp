// Apache License, Version 2.0, refer to LICENSE.txt

#include "nid/represent.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nid/error.hpp"
#include "nid/io.hpp"

namespace nid {

DocDistribution tf_distribution(const TokenizedDoc& doc, const Vocabulary& vocab, double smoothing) {
  if (vocab.empty()) throw Error("empty vocabulary");
  if (!(smoothing > 0)) throw Error("smoothing must be positive");
  std::vector<double> counts(vocab.size(), 0.0);
  double total = 0;
  for (const auto& t : doc.tokens) {
    long i = vocab.find(t);
    if (i < 0) continue;
    counts[static_cast<std::size_t>(i)] += 1;
    total += 1;
  }
  const double denom = total + smoothing * static_cast<double>(vocab.size());
  for (auto& c : counts) c = (c + smoothing) / denom;
  return {doc.id, doc.date, doc.source, std::move(counts)};
}

void check_simplex(const std::vector<double>& p, double tol, const std::string& what) {
  if (p.empty()) throw Error(what + ": empty distribution");
  double sum = 0;
  for (double v : p) {
    if (!std::isfinite(v) || v <= 0) throw Error(what + ": distribution has a non-positive component");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol) throw Error(what + ": distribution does not sum to 1");
}

namespace {

// The inclusive tolerance band is widened by a few ulps so that values
// written with six decimals (e.g. 0.300001) are judged by their decimal meaning.
constexpr double kImportBand = kSimplexTolerance + 8 * 2.220446049250313e-16;

DocDistribution validate_row(DocDistribution d, const std::string& where) {
  if (d.p.empty()) throw Error(where + ": empty probability vector");
  double sum = 0;
  for (double v : d.p) {
    if (!std::isfinite(v)) throw Error(where + ": non-finite component");
    if (v < 0) throw Error(where + ": negative component");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kImportBand) {
    throw Error(where + ": components sum to " + io::format_double(sum) + ", outside [1-1e-6, 1+1e-6]");
  }
  double floored = 0;
  for (auto& v : d.p) {
    v = std::max(v, kImportFloor);
    floored += v;
  }
  for (auto& v : d.p) v /= floored;
  return d;
}

Date parse_date_or_throw(const std::string& s, const std::string& where) {
  auto d = Date::parse(s);
  if (!d) throw Error(where + ": unparseable date '" + s + "'");
  return *d;
}

void check_dimension(std::vector<DocDistribution>& out, const std::string& where) {
  if (out.size() > 1 && out.back().p.size() != out.front().p.size()) {
    throw Error(where + ": dimension " + std::to_string(out.back().p.size()) + " differs from " +
                std::to_string(out.front().p.size()));
  }
}

}  // namespace

std::vector<DocDistribution> parse_distributions_jsonl(const std::string& text) {
  std::vector<DocDistribution> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string where = "row " + std::to_string(line_no);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
      DocDistribution d;
      d.id = rec.at("id").get<std::string>();
      where += " ('" + d.id + "')";
      d.source = rec.at("source").get<std::string>();
      d.date = parse_date_or_throw(rec.at("date").get<std::string>(), where);
      d.p = rec.at("p").get<std::vector<double>>();
      out.push_back(validate_row(std::move(d), where));
    } catch (const nlohmann::json::exception& e) {
      throw Error(where + ": malformed record (" + e.what() + ")");
    }
    check_dimension(out, where);
  }
  return out;
}

std::vector<DocDistribution> parse_distributions_csv(const std::string& text) {
  std::vector<DocDistribution> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = io::split_csv(line);
    if (header) {
      if (f.size() < 4 || f[0] != "id" || f[1] != "date" || f[2] != "source") {
        throw Error("distribution CSV header must start with id,date,source");
      }
      header = false;
      continue;
    }
    std::string where = "row " + std::to_string(line_no);
    if (f.size() < 4) throw Error(where + ": too few fields");
    DocDistribution d;
    d.id = f[0];
    where += " ('" + d.id + "')";
    d.date = parse_date_or_throw(f[1], where);
    d.source = f[2];
    for (std::size_t i = 3; i < f.size(); ++i) {
      try {
        std::size_t used = 0;
        d.p.push_back(std::stod(f[i], &used));
        if (used != f[i].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw Error(where + ": bad number '" + f[i] + "'");
      }
    }
    out.push_back(validate_row(std::move(d), where));
    check_dimension(out, where);
  }
  return out;
}

std::vector<DocDistribution> import_distributions(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error("input file not found: " + path.string());
  auto text = io::read_file(path);
  if (path.extension() == ".csv") return parse_distributions_csv(text);
  return parse_distributions_jsonl(text);
}

std::string emit_distributions(const std::vector<DocDistribution>& dists) {
  std::string out;
  for (const auto& d : dists) {
    out += "{\"id\":" + nlohmann::json(d.id).dump() + ",\"date\":\"" + d.date.iso() +
           "\",\"source\":" + nlohmann::json(d.source).dump() + ",\"p\":[";
    for (std::size_t i = 0; i < d.p.size(); ++i) {
      if (i) out += ',';
      out += io::format_double(d.p[i]);
    }
    out += "]}\n";
  }
  return out;
}

}  // namespace nid
