#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "bqrobust/question.hpp"

namespace bqrobust::simmetrics {

enum class MetricKind { bleu1, bleu2, bleu3, bleu4, rouge, cider, meteor, lasso };

MetricKind metric_from_string(const std::string& name);
std::string metric_to_string(MetricKind kind);

// Document frequencies of 1..4-grams over a corpus (one document per
// question), the substrate for the tf-idf cosine metric.
struct IdfTable {
  std::int64_t doc_count = 0;
  std::unordered_map<std::string, std::int64_t> ngram_doc_freq;

  static IdfTable build(const std::vector<TokenSeq>& docs);

  /// log(doc_count / doc_freq); unseen n-grams get doc_freq = doc_count,
  /// hence idf 0.
  double idf(const std::string& ngram_key) const;
};

/// Geometric mean of modified n-gram precisions (counts clipped against the
/// single reference) times the brevity penalty. No smoothing: any zero
/// precision zeroes the score.
double bleu(const TokenSeq& candidate, const TokenSeq& reference, int max_n);

/// LCS F-measure: R = LCS/|ref|, P = LCS/|cand|,
/// F = (1+beta^2) P R / (R + beta^2 P); 0 when LCS = 0.
double rouge_l(const TokenSeq& candidate, const TokenSeq& reference, double beta = 1.2);

/// Mean over n = 1..4 of the cosine between tf-idf n-gram vectors (raw tf).
/// Orders where neither sequence has n-grams are skipped, so identical
/// sequences score 1 whenever their n-grams carry positive idf. No length
/// penalty, no scaling.
double cider(const TokenSeq& candidate, const TokenSeq& reference, const IdfTable& idf);

/// Exact-unigram alignment maximizing matches, then minimizing chunks.
/// With m matches, P = m/|cand|, R = m/|ref|, F = 10PR/(R+9P),
/// penalty = 0.5*(chunks/m)^3, score = F*(1-penalty); 0 when m = 0.
double meteor(const TokenSeq& candidate, const TokenSeq& reference);

struct PoolEntry {
  std::int64_t question_id = 0;
  TokenSeq tokens;
};

/// Scores every pool entry against mq with the chosen metric and returns the
/// top k under the shared ranking semantics (see rank_top_k). idf is required
/// exactly for the tf-idf cosine metric.
std::vector<ScoredId> rank_by_metric(const std::vector<PoolEntry>& pool, const TokenSeq& mq,
                                     MetricKind kind, int k, const IdfTable* idf = nullptr);

}  // namespace bqrobust::simmetrics
