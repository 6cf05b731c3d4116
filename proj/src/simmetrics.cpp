#include "bqrobust/simmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bqrobust/errors.hpp"
#include "bqrobust/ranking.hpp"
#include "bqrobust/textprep.hpp"

namespace bqrobust::simmetrics {

namespace {

void require_nonempty(const TokenSeq& candidate, const TokenSeq& reference, const char* where) {
  if (candidate.empty() || reference.empty()) {
    throw ContractViolation(std::string(where) + ": sequences must be non-empty");
  }
}

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        curr[j] = prev[j - 1] + 1;
      } else {
        curr[j] = std::max(prev[j], curr[j - 1]);
      }
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

// Minimal chunk count over all maximum unigram matchings, by backtracking
// over candidate positions. Sentences here are question-length, and the
// chunk lower bound prunes hard, so exhaustive search stays cheap.
class ChunkMinimizer {
 public:
  ChunkMinimizer(const TokenSeq& candidate, const TokenSeq& reference)
      : candidate_(candidate), reference_(reference), used_(reference.size(), false) {
    std::unordered_map<std::string, int> cand_counts;
    std::unordered_map<std::string, int> ref_counts;
    for (const auto& t : candidate_) ++cand_counts[t];
    for (const auto& t : reference_) ++ref_counts[t];
    for (const auto& [token, c] : cand_counts) {
      auto it = ref_counts.find(token);
      if (it != ref_counts.end()) {
        need_[token] = std::min(c, it->second);
        total_matches_ += need_[token];
      }
    }
    remaining_ = cand_counts;
  }

  int matches() const { return total_matches_; }

  int minimal_chunks() {
    if (total_matches_ == 0) return 0;
    best_ = std::numeric_limits<int>::max();
    search(0, -2, 0);
    return best_;
  }

 private:
  void search(std::size_t pos, int prev_ref, int chunks) {
    if (chunks >= best_) return;  // optimistic bound: open chunk may extend
    if (pos == candidate_.size()) {
      best_ = chunks;
      return;
    }
    const std::string& token = candidate_[pos];
    auto need_it = need_.find(token);
    int& remaining = remaining_[token];

    if (need_it != need_.end() && need_it->second > 0) {
      // Prefer extending the current chunk so a good bound appears early.
      std::vector<int> refs;
      for (int j = 0; j < static_cast<int>(reference_.size()); ++j) {
        if (!used_[j] && reference_[j] == token) refs.push_back(j);
      }
      std::stable_sort(refs.begin(), refs.end(), [&](int a, int b) {
        return (a == prev_ref + 1) > (b == prev_ref + 1);
      });
      for (int j : refs) {
        const int next_chunks = chunks + (j == prev_ref + 1 ? 0 : 1);
        used_[j] = true;
        --need_it->second;
        --remaining;
        search(pos + 1, j, next_chunks);
        ++remaining;
        ++need_it->second;
        used_[j] = false;
      }
    }
    // Skipping is allowed only while the word's match quota stays satisfiable.
    const int needed = need_it == need_.end() ? 0 : need_it->second;
    if (remaining - 1 >= needed) {
      --remaining;
      search(pos + 1, -2, chunks);
      ++remaining;
    }
  }

  const TokenSeq& candidate_;
  const TokenSeq& reference_;
  std::vector<char> used_;
  std::unordered_map<std::string, int> need_;       // matches still owed per word
  std::unordered_map<std::string, int> remaining_;  // candidate occurrences left
  int total_matches_ = 0;
  int best_ = 0;
};

}  // namespace

MetricKind metric_from_string(const std::string& name) {
  if (name == "bleu1") return MetricKind::bleu1;
  if (name == "bleu2") return MetricKind::bleu2;
  if (name == "bleu3") return MetricKind::bleu3;
  if (name == "bleu4") return MetricKind::bleu4;
  if (name == "rouge") return MetricKind::rouge;
  if (name == "cider") return MetricKind::cider;
  if (name == "meteor") return MetricKind::meteor;
  if (name == "lasso") return MetricKind::lasso;
  throw ContractViolation("unknown metric: " + name);
}

std::string metric_to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::bleu1: return "bleu1";
    case MetricKind::bleu2: return "bleu2";
    case MetricKind::bleu3: return "bleu3";
    case MetricKind::bleu4: return "bleu4";
    case MetricKind::rouge: return "rouge";
    case MetricKind::cider: return "cider";
    case MetricKind::meteor: return "meteor";
    case MetricKind::lasso: return "lasso";
  }
  throw ContractViolation("unknown metric kind");
}

IdfTable IdfTable::build(const std::vector<TokenSeq>& docs) {
  IdfTable table;
  table.doc_count = static_cast<std::int64_t>(docs.size());
  for (const auto& doc : docs) {
    for (int n = 1; n <= 4; ++n) {
      for (const auto& [gram, count] : textprep::ngram_counts(doc, n)) {
        (void)count;  // document frequency counts each gram once per doc
        ++table.ngram_doc_freq[gram];
      }
    }
  }
  return table;
}

double IdfTable::idf(const std::string& ngram_key) const {
  auto it = ngram_doc_freq.find(ngram_key);
  const std::int64_t df = it == ngram_doc_freq.end() ? doc_count : it->second;
  return std::log(static_cast<double>(doc_count) / static_cast<double>(df));
}

double bleu(const TokenSeq& candidate, const TokenSeq& reference, int max_n) {
  require_nonempty(candidate, reference, "bleu");
  if (max_n < 1 || max_n > 4) {
    throw ContractViolation("bleu: max_n must be in 1..4");
  }
  double log_precision_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    const auto cand_grams = textprep::ngram_counts(candidate, n);
    if (cand_grams.empty()) return 0.0;
    const auto ref_grams = textprep::ngram_counts(reference, n);
    std::int64_t clipped = 0;
    std::int64_t total = 0;
    for (const auto& [gram, count] : cand_grams) {
      total += count;
      auto it = ref_grams.find(gram);
      if (it != ref_grams.end()) {
        clipped += std::min(count, it->second);
      }
    }
    if (clipped == 0) return 0.0;
    log_precision_sum += std::log(static_cast<double>(clipped) / static_cast<double>(total));
  }
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double brevity = c > r ? 1.0 : std::exp(1.0 - r / c);
  return brevity * std::exp(log_precision_sum / max_n);
}

double rouge_l(const TokenSeq& candidate, const TokenSeq& reference, double beta) {
  require_nonempty(candidate, reference, "rouge_l");
  if (beta <= 0.0) {
    throw ContractViolation("rouge_l: beta must be positive");
  }
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  if (lcs == 0.0) return 0.0;
  const double recall = lcs / static_cast<double>(reference.size());
  const double precision = lcs / static_cast<double>(candidate.size());
  const double b2 = beta * beta;
  return (1.0 + b2) * precision * recall / (recall + b2 * precision);
}

double cider(const TokenSeq& candidate, const TokenSeq& reference, const IdfTable& idf) {
  require_nonempty(candidate, reference, "cider");
  if (idf.doc_count <= 0) {
    throw EmptyIdf("cider: idf table is empty");
  }
  double sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= 4; ++n) {
    const auto cand_grams = textprep::ngram_counts(candidate, n);
    const auto ref_grams = textprep::ngram_counts(reference, n);
    if (cand_grams.empty() && ref_grams.empty()) continue;  // both too short
    ++orders;
    double dot = 0.0;
    double cand_sq = 0.0;
    double ref_sq = 0.0;
    for (const auto& [gram, count] : cand_grams) {
      const double wc = static_cast<double>(count) * idf.idf(gram);
      cand_sq += wc * wc;
      auto it = ref_grams.find(gram);
      if (it != ref_grams.end()) {
        dot += wc * static_cast<double>(it->second) * idf.idf(gram);
      }
    }
    for (const auto& [gram, count] : ref_grams) {
      const double wr = static_cast<double>(count) * idf.idf(gram);
      ref_sq += wr * wr;
    }
    if (cand_sq > 0.0 && ref_sq > 0.0) {
      sum += dot / (std::sqrt(cand_sq) * std::sqrt(ref_sq));
    }
  }
  return orders == 0 ? 0.0 : sum / static_cast<double>(orders);
}

double meteor(const TokenSeq& candidate, const TokenSeq& reference) {
  require_nonempty(candidate, reference, "meteor");
  ChunkMinimizer aligner(candidate, reference);
  const double m = static_cast<double>(aligner.matches());
  if (m == 0.0) return 0.0;
  const double chunks = static_cast<double>(aligner.minimal_chunks());
  const double precision = m / static_cast<double>(candidate.size());
  const double recall = m / static_cast<double>(reference.size());
  const double f_mean = 10.0 * precision * recall / (recall + 9.0 * precision);
  const double penalty = 0.5 * std::pow(chunks / m, 3.0);
  return f_mean * (1.0 - penalty);
}

std::vector<ScoredId> rank_by_metric(const std::vector<PoolEntry>& pool, const TokenSeq& mq,
                                     MetricKind kind, int k, const IdfTable* idf) {
  if (kind == MetricKind::lasso) {
    throw ContractViolation("rank_by_metric: lasso ranking is handled by the solver");
  }
  if (kind == MetricKind::cider && idf == nullptr) {
    throw MissingIdf("rank_by_metric: tf-idf cosine ranking needs an IdfTable");
  }
  std::vector<ScoredId> scored(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    double score = 0.0;
    switch (kind) {
      case MetricKind::bleu1: score = bleu(pool[i].tokens, mq, 1); break;
      case MetricKind::bleu2: score = bleu(pool[i].tokens, mq, 2); break;
      case MetricKind::bleu3: score = bleu(pool[i].tokens, mq, 3); break;
      case MetricKind::bleu4: score = bleu(pool[i].tokens, mq, 4); break;
      case MetricKind::rouge: score = rouge_l(pool[i].tokens, mq); break;
      case MetricKind::cider: score = cider(pool[i].tokens, mq, *idf); break;
      case MetricKind::meteor: score = meteor(pool[i].tokens, mq); break;
      case MetricKind::lasso: break;  // unreachable
    }
    scored[i] = {pool[i].question_id, score};
  }
  return rank_top_k(std::move(scored), k);
}

}  // namespace bqrobust::simmetrics
