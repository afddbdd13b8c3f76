// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "nid/date.hpp"

namespace nid {

// One dated, sourced text unit (title and body already joined).
struct Document {
  std::string id;
  Date date;
  std::string source;
  std::string text;

  bool operator==(const Document&) const = default;
};

struct TokenizedDoc {
  std::string id;
  Date date;
  std::string source;
  std::vector<std::string> tokens;
};

// Distinct terms in lexicographic order; index is the inverse map.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> sorted_terms);

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::string& term(std::size_t i) const { return terms_[i]; }
  // -1 when absent.
  long find(const std::string& term) const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
};

using StopwordSet = std::unordered_set<std::string>;
using Lemmatizer = std::function<std::string(const std::string&)>;

struct NormalizeOpts {
  // Applied to each surviving token; empty means identity.
  Lemmatizer lemmatize;
};

// Reads a JSONL corpus. Each non-blank line is an object with id, date,
// source and either text or title/body. Output is sorted by (date, id).
std::vector<Document> ingest(const std::filesystem::path& path);
std::vector<Document> parse_corpus(const std::string& jsonl);

// Inverse of ingest: one JSON object per line in the given order.
std::string emit_corpus(const std::vector<Document>& docs);

void sort_documents(std::vector<Document>& docs);

// Casefolds ASCII and Latin-1 letters encoded as UTF-8; other bytes pass through.
std::string casefold(const std::string& s);

// A token is a numeral when, after dropping '.', ',', ':' and '-', it is
// non-empty and consists only of decimal digits.
bool is_numeral(const std::string& token);

TokenizedDoc normalize(const Document& doc, const StopwordSet& stopwords,
                       const NormalizeOpts& opts = {});

Vocabulary build_vocabulary(const std::vector<TokenizedDoc>& docs, int min_count);

// One casefolded token per line; blank lines and '#' comments ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);

// TSV "surface<TAB>lemma"; surfaces are casefolded on load.
std::map<std::string, std::string> load_lemma_map(const std::filesystem::path& path);
Lemmatizer map_lemmatizer(std::map<std::string, std::string> lemmas);

}  // namespace nid
