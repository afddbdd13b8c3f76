// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nid/corpus.hpp"

namespace nid {

// A document as a point on the probability simplex. Every distribution that
// leaves this module is strictly positive and sums to 1 within 1e-9.
struct DocDistribution {
  std::string id;
  Date date;
  std::string source;
  std::vector<double> p;
};

inline constexpr double kSimplexTolerance = 1e-6;  // accepted on import
inline constexpr double kImportFloor = 1e-12;

// Smoothed term frequencies: (count_i + s) / (total + s * V).
DocDistribution tf_distribution(const TokenizedDoc& doc, const Vocabulary& vocab, double smoothing);

// Default smoothing of 0.5 / V, i.e. half a pseudo-token spread over the vocabulary.
inline double default_tf_smoothing(const Vocabulary& vocab) { return 0.5 / static_cast<double>(vocab.size()); }

struct LdaModel {
  int topics = 0;
  double alpha = 0;
  double beta = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  Vocabulary vocab;
  // topics x V, row-major.
  std::vector<std::int64_t> topic_term_counts;
  std::vector<std::int64_t> topic_totals;

  std::size_t vocab_size() const { return vocab.size(); }
  std::int64_t count(int k, std::size_t w) const { return topic_term_counts[k * vocab.size() + w]; }
  // Posterior-mean topic-term distribution (n_kw + beta) / (n_k + V beta).
  std::vector<double> topic_term_distribution(int k) const;
};

struct LdaParams {
  int topics = 20;
  double alpha = -1;  // negative: 5 / topics
  double beta = 0.01;
  int iterations = 500;
  std::uint64_t seed = 0;
};

// Collapsed Gibbs sampling over the in-vocabulary tokens of docs. Documents
// without in-vocabulary tokens are skipped.
LdaModel lda_fit(const std::vector<TokenizedDoc>& docs, const Vocabulary& vocab, const LdaParams& params);

struct InferredDistribution {
  DocDistribution dist;
  // The document had no in-vocabulary token and received the symmetric prior.
  bool prior_fallback = false;
};

// Gibbs sampling of one document's topic assignments against fixed
// topic-term counts; returns the mean of (n_dk + alpha) / (N_d + K alpha)
// over the retained sweeps.
InferredDistribution lda_infer(const LdaModel& model, const TokenizedDoc& doc, int burn, int samples,
                               std::uint64_t seed);

// Validates rows against the simplex (tolerance 1e-6), floors at 1e-12 and
// renormalizes. Accepts JSONL ({"id","date","source","p"}) or CSV with
// header id,date,source,p0..pK-1, chosen by the .csv extension.
std::vector<DocDistribution> import_distributions(const std::filesystem::path& path);
std::vector<DocDistribution> parse_distributions_jsonl(const std::string& text);
std::vector<DocDistribution> parse_distributions_csv(const std::string& text);

std::string emit_distributions(const std::vector<DocDistribution>& dists);

// Throws when p is not strictly positive or its sum is off by more than tol.
void check_simplex(const std::vector<double>& p, double tol, const std::string& what);

}  // namespace nid
