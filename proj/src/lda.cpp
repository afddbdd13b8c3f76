// Apache License, Version 2.0, refer to LICENSE.txt

#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <set>

#include "nid/error.hpp"
#include "nid/represent.hpp"
#include "nid/rng.hpp"

namespace nid {

namespace {

std::vector<std::vector<std::size_t>> to_word_ids(const std::vector<TokenizedDoc>& docs, const Vocabulary& vocab) {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    std::vector<std::size_t> ids;
    for (const auto& t : d.tokens) {
      long i = vocab.find(t);
      if (i >= 0) ids.push_back(static_cast<std::size_t>(i));
    }
    out.push_back(std::move(ids));
  }
  return out;
}

// Inverse-CDF draw from unnormalized weights.
int draw(const std::vector<double>& weights, Rng& rng) {
  double total = 0;
  for (double w : weights) total += w;
  double u = boost::random::uniform_01<double>{}(rng) * total;
  for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
    u -= weights[k];
    if (u < 0) return static_cast<int>(k);
  }
  return static_cast<int>(weights.size() - 1);
}

}  // namespace

std::vector<double> LdaModel::topic_term_distribution(int k) const {
  const std::size_t v = vocab_size();
  std::vector<double> out(v);
  const double denom = static_cast<double>(topic_totals[k]) + static_cast<double>(v) * beta;
  for (std::size_t w = 0; w < v; ++w) out[w] = (static_cast<double>(count(k, w)) + beta) / denom;
  return out;
}

LdaModel lda_fit(const std::vector<TokenizedDoc>& docs, const Vocabulary& vocab, const LdaParams& params) {
  const int k_topics = params.topics;
  if (k_topics < 2) throw Error("LDA needs at least 2 topics");
  if (params.iterations < 1) throw Error("LDA needs at least 1 iteration");
  if (vocab.empty()) throw Error("empty vocabulary");
  const double alpha = params.alpha > 0 ? params.alpha : 5.0 / k_topics;
  if (!(params.beta > 0)) throw Error("LDA beta must be positive");

  auto words = to_word_ids(docs, vocab);
  std::set<std::size_t> distinct;
  for (const auto& d : words) distinct.insert(d.begin(), d.end());
  if (distinct.empty()) throw Error("LDA: every document is empty after vocabulary filtering");
  if (static_cast<std::size_t>(k_topics) > distinct.size()) {
    throw Error("LDA: " + std::to_string(k_topics) + " topics exceed the " + std::to_string(distinct.size()) +
                " distinct corpus tokens");
  }

  const std::size_t v = vocab.size();
  const double v_beta = static_cast<double>(v) * params.beta;
  LdaModel m;
  m.topics = k_topics;
  m.alpha = alpha;
  m.beta = params.beta;
  m.seed = params.seed;
  m.iterations = params.iterations;
  m.vocab = vocab;
  m.topic_term_counts.assign(static_cast<std::size_t>(k_topics) * v, 0);
  m.topic_totals.assign(k_topics, 0);

  Rng rng(params.seed);
  boost::random::uniform_int_distribution<int> pick(0, k_topics - 1);
  std::vector<std::vector<int>> z(words.size());
  std::vector<std::vector<std::int64_t>> doc_topic(words.size(), std::vector<std::int64_t>(k_topics, 0));
  for (std::size_t d = 0; d < words.size(); ++d) {
    z[d].resize(words[d].size());
    for (std::size_t i = 0; i < words[d].size(); ++i) {
      int k = pick(rng);
      z[d][i] = k;
      ++doc_topic[d][k];
      ++m.topic_term_counts[k * v + words[d][i]];
      ++m.topic_totals[k];
    }
  }

  std::vector<double> weights(k_topics);
  for (int it = 0; it < params.iterations; ++it) {
    for (std::size_t d = 0; d < words.size(); ++d) {
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const std::size_t w = words[d][i];
        int k = z[d][i];
        --doc_topic[d][k];
        --m.topic_term_counts[k * v + w];
        --m.topic_totals[k];
        for (int t = 0; t < k_topics; ++t) {
          weights[t] = (static_cast<double>(doc_topic[d][t]) + alpha) *
                       (static_cast<double>(m.topic_term_counts[t * v + w]) + params.beta) /
                       (static_cast<double>(m.topic_totals[t]) + v_beta);
        }
        k = draw(weights, rng);
        z[d][i] = k;
        ++doc_topic[d][k];
        ++m.topic_term_counts[k * v + w];
        ++m.topic_totals[k];
      }
    }
  }
  return m;
}

InferredDistribution lda_infer(const LdaModel& model, const TokenizedDoc& doc, int burn, int samples,
                               std::uint64_t seed) {
  if (model.topics < 2 || model.topic_totals.empty()) throw Error("LDA model is not fitted");
  if (samples < 1) throw Error("lda_infer needs at least 1 sample");
  if (burn < 0) throw Error("lda_infer burn must be non-negative");
  const int k_topics = model.topics;
  InferredDistribution out;
  out.dist = {doc.id, doc.date, doc.source, std::vector<double>(k_topics, 1.0 / k_topics)};

  std::vector<std::size_t> words;
  for (const auto& t : doc.tokens) {
    long i = model.vocab.find(t);
    if (i >= 0) words.push_back(static_cast<std::size_t>(i));
  }
  if (words.empty()) {
    out.prior_fallback = true;
    return out;
  }

  const std::size_t v = model.vocab_size();
  const double v_beta = static_cast<double>(v) * model.beta;
  // Topic-word likelihoods are fixed during inference.
  std::vector<double> phi(static_cast<std::size_t>(k_topics) * words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (int k = 0; k < k_topics; ++k) {
      phi[i * k_topics + k] = (static_cast<double>(model.count(k, words[i])) + model.beta) /
                              (static_cast<double>(model.topic_totals[k]) + v_beta);
    }
  }

  Rng rng(seed);
  boost::random::uniform_int_distribution<int> pick(0, k_topics - 1);
  std::vector<int> z(words.size());
  std::vector<std::int64_t> n_k(k_topics, 0);
  for (auto& zi : z) {
    zi = pick(rng);
    ++n_k[zi];
  }
  std::vector<double> acc(k_topics, 0.0), weights(k_topics);
  const double denom = static_cast<double>(words.size()) + k_topics * model.alpha;
  for (int sweep = 0; sweep < burn + samples; ++sweep) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      --n_k[z[i]];
      for (int k = 0; k < k_topics; ++k) {
        weights[k] = (static_cast<double>(n_k[k]) + model.alpha) * phi[i * k_topics + k];
      }
      z[i] = draw(weights, rng);
      ++n_k[z[i]];
    }
    if (sweep >= burn) {
      for (int k = 0; k < k_topics; ++k) acc[k] += (static_cast<double>(n_k[k]) + model.alpha) / denom;
    }
  }
  double sum = 0;
  for (auto& a : acc) {
    a /= samples;
    sum += a;
  }
  for (auto& a : acc) a /= sum;
  out.dist.p = std::move(acc);
  return out;
}

}  // namespace nid
