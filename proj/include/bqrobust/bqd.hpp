#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bqrobust/embedding.hpp"
#include "bqrobust/lasso.hpp"
#include "bqrobust/question.hpp"
#include "bqrobust/simmetrics.hpp"

namespace bqrobust::bqd {

inline constexpr int kDefaultTopK = 21;
inline constexpr int kPartitionCount = 7;
inline constexpr int kPartitionSize = 3;
inline constexpr int kWordLimit = 26;

struct ScoredBq {
  Question bq;
  double score = 0.0;

  bool operator==(const ScoredBq&) const = default;
};

// One main question with its top-k ranked basic questions. Scores are
// non-increasing and no basic question token-equals the main question.
struct BqdEntry {
  std::int64_t image_id = 0;
  Question mq;
  std::vector<ScoredBq> ranked;
};

// One of the 7 consecutive noise levels: partition p holds ranks 3p-2..3p.
struct Partition {
  int index = 0;  // 1..7
  std::vector<ScoredBq> bqs;
};

struct ConcatThresholds {
  double s1 = 0.60;
  double s2 = 0.58;
  double s3 = 0.41;
};

// How the three threshold checks combine. In the default mode the first two
// checks are independent and later assignments win, while the third check
// only counts on top of a passed second check; the cascade mode stops at the
// first failed check.
enum class ConcatMode { override_sequential, cascade };

struct AugmentResult {
  std::string text;
  int word_count = 0;
  bool word_limit_exceeded = false;
};

struct BuildConfig {
  simmetrics::MetricKind ranker = simmetrics::MetricKind::lasso;
  int k = kDefaultTopK;
  lasso::SolverConfig solver;
  int threads = 0;  // 0 = BQROBUST_THREADS or hardware concurrency
};

// Solver diagnostics accumulated over one build.
struct BuildStats {
  std::int64_t entries = 0;
  std::int64_t pool_after_dedup = 0;
  std::int64_t solves = 0;
  std::int64_t converged_solves = 0;
  int max_passes = 0;
  double max_kkt_residual = 0.0;
};

/// Builds one BqdEntry per main question: dedups the pool against the main
/// questions (always; callers are not trusted), ranks it with the configured
/// ranker and keeps the top k. Entries come back ordered by mq question_id.
/// The encoder is consulted only on the lasso path.
std::vector<BqdEntry> build_bqd(const std::vector<Question>& pool,
                                const std::vector<Question>& mqs, const BuildConfig& cfg,
                                const embedding::Encoder* encoder = nullptr,
                                BuildStats* stats = nullptr);

/// Splits the 21 ranked BQs into 7 consecutive partitions of 3.
std::vector<Partition> partition(const BqdEntry& entry);

/// Concatenates the original question texts with single spaces. Word count is
/// measured on the normalized concatenation; exceeding 26 words sets the
/// warning flag but never rejects.
AugmentResult augment(const Question& mq, const std::vector<ScoredBq>& bqs);

/// How many of the top three BQs to append given the thresholds:
/// n=1 when score1 > s1, n=2 when score2/score1 > s2, n=3 when
/// score3/score2 > s3. Ratios with zero denominator count as failed checks.
int algorithm1_select(double score1, double score2, double score3, const ConcatThresholds& th,
                      ConcatMode mode = ConcatMode::override_sequential);

struct ScoreStats {
  struct MeanStd {
    double avg = 0.0;
    double std = 0.0;  // population standard deviation
  };
  MeanStd score1;
  MeanStd ratio_2_over_1;
  MeanStd ratio_3_over_2;
  std::int64_t excluded_ratio_2_over_1 = 0;  // zero-denominator exclusions
  std::int64_t excluded_ratio_3_over_2 = 0;
  std::int64_t entries = 0;
};

/// Mean and population std of score1, score2/score1 and score3/score2 over
/// the dataset; ratios with zero denominators are excluded and counted.
ScoreStats score_stats(const std::vector<BqdEntry>& entries);

struct AppendHistogram {
  std::array<std::int64_t, 4> counts{};      // how many entries append 0..3 BQs
  std::array<double, 4> percentages{};
  std::int64_t total = 0;
};

AppendHistogram append_histogram(const std::vector<BqdEntry>& entries, const ConcatThresholds& th,
                                 ConcatMode mode = ConcatMode::override_sequential);

}  // namespace bqrobust::bqd
