#include "bqrobust/bqd.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "bqrobust/errors.hpp"
#include "bqrobust/parallel.hpp"
#include "bqrobust/textprep.hpp"

namespace bqrobust::bqd {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\n\r\f\v");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\n\r\f\v");
  return s.substr(begin, end - begin + 1);
}

double checked_ratio(double numerator, double denominator) {
  return denominator == 0.0 ? 0.0 : numerator / denominator;
}

ScoreStats::MeanStd mean_std(const std::vector<double>& values) {
  ScoreStats::MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.avg = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - out.avg) * (v - out.avg);
  out.std = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

}  // namespace

std::vector<BqdEntry> build_bqd(const std::vector<Question>& pool,
                                const std::vector<Question>& mqs, const BuildConfig& cfg,
                                const embedding::Encoder* encoder, BuildStats* stats) {
  if (cfg.k < 1) {
    throw ContractViolation("build_bqd: k must be >= 1");
  }
  if (mqs.empty()) {
    throw EmptyInput("build_bqd: no main questions");
  }
  {
    std::unordered_set<std::int64_t> seen;
    for (const auto& mq : mqs) {
      if (!seen.insert(mq.question_id).second) {
        throw DuplicateId("build_bqd: duplicate main question_id " +
                          std::to_string(mq.question_id));
      }
    }
  }

  // The dedup is not optional: a pool question identical to an MQ would
  // absorb the entire sparse budget and zero out every other score.
  const std::vector<Question> clean_pool = textprep::dedup_pool(pool, mqs);
  if (static_cast<int>(clean_pool.size()) < cfg.k) {
    throw PoolTooSmall("build_bqd: pool has " + std::to_string(clean_pool.size()) +
                       " questions after dedup, need at least " + std::to_string(cfg.k));
  }

  std::vector<TokenSeq> pool_tokens(clean_pool.size());
  for (std::size_t i = 0; i < clean_pool.size(); ++i) {
    pool_tokens[i] = textprep::normalize(clean_pool[i].text);
  }
  std::vector<Question> ordered_mqs = mqs;
  std::sort(ordered_mqs.begin(), ordered_mqs.end(),
            [](const Question& a, const Question& b) { return a.question_id < b.question_id; });
  std::vector<TokenSeq> mq_tokens(ordered_mqs.size());
  for (std::size_t i = 0; i < ordered_mqs.size(); ++i) {
    mq_tokens[i] = textprep::normalize(ordered_mqs[i].text);
  }

  std::unordered_map<std::int64_t, const Question*> pool_by_id;
  pool_by_id.reserve(clean_pool.size());
  for (const auto& q : clean_pool) {
    pool_by_id.emplace(q.question_id, &q);
  }

  BuildStats local_stats;
  local_stats.pool_after_dedup = static_cast<std::int64_t>(clean_pool.size());

  std::vector<std::vector<ScoredId>> ranked(ordered_mqs.size());

  if (cfg.ranker == simmetrics::MetricKind::lasso) {
    if (encoder == nullptr) {
      throw ContractViolation("build_bqd: lasso ranking needs an encoder");
    }
    Eigen::MatrixXd columns(encoder->dim(), static_cast<Eigen::Index>(clean_pool.size()));
    std::vector<std::int64_t> ids(clean_pool.size());
    for (std::size_t i = 0; i < clean_pool.size(); ++i) {
      columns.col(static_cast<Eigen::Index>(i)) = encoder->encode(clean_pool[i], pool_tokens[i]);
      ids[i] = clean_pool[i].question_id;
    }
    const lasso::Dictionary dict = lasso::Dictionary::build(std::move(columns), std::move(ids));

    std::vector<lasso::LassoSolution> solutions(ordered_mqs.size());
    parallel_for(static_cast<std::int64_t>(ordered_mqs.size()), cfg.threads,
                 [&](std::int64_t i) {
                   const Eigen::VectorXd b = encoder->encode(ordered_mqs[i], mq_tokens[i]);
                   solutions[i] = lasso::solve(dict, b, cfg.solver);
                   ranked[i] = lasso::rank_scores(dict, solutions[i], cfg.k);
                 });
    for (const auto& sol : solutions) {
      ++local_stats.solves;
      if (sol.converged) ++local_stats.converged_solves;
      local_stats.max_passes = std::max(local_stats.max_passes, sol.iterations);
      local_stats.max_kkt_residual = std::max(local_stats.max_kkt_residual, sol.kkt_residual);
    }
  } else {
    std::vector<simmetrics::PoolEntry> entries(clean_pool.size());
    for (std::size_t i = 0; i < clean_pool.size(); ++i) {
      entries[i] = {clean_pool[i].question_id, pool_tokens[i]};
    }
    simmetrics::IdfTable idf;
    if (cfg.ranker == simmetrics::MetricKind::cider) {
      std::vector<TokenSeq> docs = pool_tokens;
      docs.insert(docs.end(), mq_tokens.begin(), mq_tokens.end());
      idf = simmetrics::IdfTable::build(docs);
    }
    parallel_for(static_cast<std::int64_t>(ordered_mqs.size()), cfg.threads,
                 [&](std::int64_t i) {
                   ranked[i] = simmetrics::rank_by_metric(entries, mq_tokens[i], cfg.ranker,
                                                          cfg.k, &idf);
                 });
  }

  std::vector<BqdEntry> result(ordered_mqs.size());
  for (std::size_t i = 0; i < ordered_mqs.size(); ++i) {
    BqdEntry entry;
    entry.image_id = ordered_mqs[i].image_id;
    entry.mq = ordered_mqs[i];
    entry.ranked.reserve(ranked[i].size());
    for (const auto& s : ranked[i]) {
      entry.ranked.push_back({*pool_by_id.at(s.question_id), s.score});
    }
    result[i] = std::move(entry);
  }
  local_stats.entries = static_cast<std::int64_t>(result.size());
  if (stats != nullptr) {
    *stats = local_stats;
  }
  return result;
}

std::vector<Partition> partition(const BqdEntry& entry) {
  if (entry.ranked.size() != static_cast<std::size_t>(kDefaultTopK)) {
    throw WrongK("partition: entry has " + std::to_string(entry.ranked.size()) +
                 " ranked BQs, the 7x3 partition scheme needs exactly 21");
  }
  std::vector<Partition> parts(kPartitionCount);
  for (int p = 1; p <= kPartitionCount; ++p) {
    parts[p - 1].index = p;
    parts[p - 1].bqs.assign(entry.ranked.begin() + (p - 1) * kPartitionSize,
                            entry.ranked.begin() + p * kPartitionSize);
  }
  return parts;
}

AugmentResult augment(const Question& mq, const std::vector<ScoredBq>& bqs) {
  if (bqs.empty()) {
    throw ContractViolation("augment: at least one basic question required");
  }
  std::string text = trim(mq.text);
  for (const auto& bq : bqs) {
    text.push_back(' ');
    text += trim(bq.bq.text);
  }
  AugmentResult out;
  out.text = std::move(text);
  out.word_count = static_cast<int>(textprep::normalize(out.text).size());
  out.word_limit_exceeded = out.word_count > kWordLimit;
  return out;
}

int algorithm1_select(double score1, double score2, double score3, const ConcatThresholds& th,
                      ConcatMode mode) {
  if (!(score1 >= score2 && score2 >= score3 && score3 >= 0.0)) {
    throw ContractViolation("algorithm1_select: scores must satisfy s1 >= s2 >= s3 >= 0");
  }
  const bool take1 = score1 > th.s1;
  const bool take2 = checked_ratio(score2, score1) > th.s2;
  const bool take3 = checked_ratio(score3, score2) > th.s3;
  if (mode == ConcatMode::cascade) {
    if (!take1) return 0;
    if (!take2) return 1;
    return take3 ? 3 : 2;
  }
  // Checks 1 and 2 are independent (a failed first check does not block the
  // second), later assignments win; the third check builds on the second,
  // since BQ3 is only ever appended on top of BQ2.
  if (take2) return take3 ? 3 : 2;
  return take1 ? 1 : 0;
}

ScoreStats score_stats(const std::vector<BqdEntry>& entries) {
  if (entries.empty()) {
    throw EmptyInput("score_stats: no entries");
  }
  std::vector<double> s1;
  std::vector<double> r21;
  std::vector<double> r32;
  s1.reserve(entries.size());
  ScoreStats stats;
  for (const auto& entry : entries) {
    if (entry.ranked.size() < 3) {
      throw ContractViolation("score_stats: every entry needs at least 3 ranked BQs");
    }
    const double a = entry.ranked[0].score;
    const double b = entry.ranked[1].score;
    const double c = entry.ranked[2].score;
    s1.push_back(a);
    if (a == 0.0) {
      ++stats.excluded_ratio_2_over_1;
    } else {
      r21.push_back(b / a);
    }
    if (b == 0.0) {
      ++stats.excluded_ratio_3_over_2;
    } else {
      r32.push_back(c / b);
    }
  }
  stats.score1 = mean_std(s1);
  stats.ratio_2_over_1 = mean_std(r21);
  stats.ratio_3_over_2 = mean_std(r32);
  stats.entries = static_cast<std::int64_t>(entries.size());
  return stats;
}

AppendHistogram append_histogram(const std::vector<BqdEntry>& entries, const ConcatThresholds& th,
                                 ConcatMode mode) {
  AppendHistogram hist;
  for (const auto& entry : entries) {
    if (entry.ranked.size() < 3) {
      throw ContractViolation("append_histogram: every entry needs at least 3 ranked BQs");
    }
    const int n = algorithm1_select(entry.ranked[0].score, entry.ranked[1].score,
                                    entry.ranked[2].score, th, mode);
    ++hist.counts[static_cast<std::size_t>(n)];
  }
  hist.total = static_cast<std::int64_t>(entries.size());
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    hist.percentages[i] = hist.total == 0
                              ? 0.0
                              : 100.0 * static_cast<double>(hist.counts[i]) /
                                    static_cast<double>(hist.total);
  }
  return hist;
}

}  // namespace bqrobust::bqd
