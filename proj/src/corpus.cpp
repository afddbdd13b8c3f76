// Apache License, Version 2.0, refer to LICENSE.txt

#include "nid/corpus.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nid/error.hpp"
#include "nid/io.hpp"

namespace nid {

using nlohmann::json;

Vocabulary::Vocabulary(std::vector<std::string> sorted_terms) : terms_(std::move(sorted_terms)) {
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) throw Error("vocabulary terms must be sorted and distinct");
    index_.emplace(terms_[i], i);
  }
}

long Vocabulary::find(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_ascii_punct(char c) {
  auto u = static_cast<unsigned char>(c);
  return u < 0x80 && u > 0x20 && u != 0x7f && !((u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') ||
                                                 (u >= 'A' && u <= 'Z'));
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string string_field(const json& rec, const char* key, std::size_t line_no) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) {
    throw Error("line " + std::to_string(line_no) + ": malformed record, missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

void sort_documents(std::vector<Document>& docs) {
  std::stable_sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) {
    if (a.date != b.date) return a.date < b.date;
    return a.id < b.id;
  });
}

std::vector<Document> parse_corpus(const std::string& jsonl) {
  std::vector<Document> docs;
  std::unordered_map<std::string, std::size_t> seen;  // id -> line
  std::istringstream in(jsonl);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error("line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
    }
    if (!rec.is_object()) throw Error("line " + std::to_string(line_no) + ": malformed record, expected an object");

    Document doc;
    doc.id = string_field(rec, "id", line_no);
    doc.source = string_field(rec, "source", line_no);
    // Title and body may arrive split; they are joined with one space.
    if (rec.contains("text")) {
      doc.text = string_field(rec, "text", line_no);
    } else if (rec.contains("title") || rec.contains("body")) {
      std::string title = rec.contains("title") ? string_field(rec, "title", line_no) : "";
      std::string body = rec.contains("body") ? string_field(rec, "body", line_no) : "";
      doc.text = title.empty() ? body : body.empty() ? title : title + " " + body;
    } else {
      throw Error("line " + std::to_string(line_no) + ": malformed record, missing string field 'text'");
    }

    auto date_str = string_field(rec, "date", line_no);
    auto date = Date::parse(date_str);
    if (!date) {
      throw Error("record '" + doc.id + "' (line " + std::to_string(line_no) + "): unparseable date '" + date_str + "'");
    }
    doc.date = *date;
    if (trim(doc.text).empty()) {
      throw Error("record '" + doc.id + "' (line " + std::to_string(line_no) + "): empty text");
    }
    auto [it, inserted] = seen.emplace(doc.id, line_no);
    if (!inserted) {
      throw Error("duplicate document id '" + doc.id + "' on lines " + std::to_string(it->second) + " and " +
                  std::to_string(line_no));
    }
    docs.push_back(std::move(doc));
  }
  sort_documents(docs);
  return docs;
}

std::vector<Document> ingest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error("input file not found: " + path.string());
  return parse_corpus(io::read_file(path));
}

std::string emit_corpus(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& d : docs) {
    nlohmann::ordered_json rec;
    rec["id"] = d.id;
    rec["date"] = d.date.iso();
    rec["source"] = d.source;
    rec["text"] = d.text;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::string casefold(const std::string& s) {
  std::string out = s;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto u = static_cast<unsigned char>(out[i]);
    if (u >= 'A' && u <= 'Z') {
      out[i] = static_cast<char>(u + 32);
    } else if (u == 0xC3 && i + 1 < out.size()) {
      // U+00C0..U+00DE map to U+00E0..U+00FE, except U+00D7 (multiplication sign).
      auto v = static_cast<unsigned char>(out[i + 1]);
      if (v >= 0x80 && v <= 0x9E && v != 0x97) out[i + 1] = static_cast<char>(v + 0x20);
      ++i;
    }
  }
  return out;
}

bool is_numeral(const std::string& token) {
  bool any = false;
  for (char c : token) {
    if (c == '.' || c == ',' || c == ':' || c == '-') continue;
    if (c < '0' || c > '9') return false;
    any = true;
  }
  return any;
}

TokenizedDoc normalize(const Document& doc, const StopwordSet& stopwords, const NormalizeOpts& opts) {
  TokenizedDoc out{doc.id, doc.date, doc.source, {}};
  const std::string& text = doc.text;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    std::size_t b = i, e = j;
    while (b < e && is_ascii_punct(text[b])) ++b;
    while (e > b && is_ascii_punct(text[e - 1])) --e;
    i = j;
    if (b == e) continue;
    std::string tok = casefold(text.substr(b, e - b));
    if (is_numeral(tok) || stopwords.count(tok)) continue;
    if (opts.lemmatize) tok = opts.lemmatize(tok);
    if (!tok.empty()) out.tokens.push_back(std::move(tok));
  }
  return out;
}

Vocabulary build_vocabulary(const std::vector<TokenizedDoc>& docs, int min_count) {
  if (min_count < 1) throw Error("min_count must be >= 1");
  std::map<std::string, long> counts;
  for (const auto& d : docs) {
    for (const auto& t : d.tokens) ++counts[t];
  }
  std::vector<std::string> terms;
  for (const auto& [term, n] : counts) {
    if (n >= min_count) terms.push_back(term);
  }
  if (terms.empty()) throw Error("empty vocabulary");
  return Vocabulary(std::move(terms));
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  StopwordSet out;
  for (const auto& raw : io::read_lines(path)) {
    auto line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    out.insert(casefold(line));
  }
  return out;
}

std::map<std::string, std::string> load_lemma_map(const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  for (const auto& line : io::read_lines(path)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(path.string() + ": line " + std::to_string(line_no) + ": expected surface<TAB>lemma");
    }
    out[casefold(trim(line.substr(0, tab)))] = trim(line.substr(tab + 1));
  }
  return out;
}

Lemmatizer map_lemmatizer(std::map<std::string, std::string> lemmas) {
  return [m = std::move(lemmas)](const std::string& tok) {
    auto it = m.find(tok);
    return it == m.end() ? tok : it->second;
  };
}

}  // namespace nid
