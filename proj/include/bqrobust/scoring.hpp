#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bqrobust::scoring {

// Ground-truth answers of one question. Answers are stored normalized
// (see normalize_answer); the standard corpus carries 10 per question,
// any count >= 3 is accepted.
struct AnswerSet {
  std::int64_t question_id = 0;
  std::vector<std::string> answers;
  std::string answer_type;  // "yes/no" | "number" | "other"
};

struct Prediction {
  std::int64_t question_id = 0;
  std::string answer;  // normalized
};

struct AccuracyReport {
  double overall = 0.0;  // percent
  std::map<std::string, double> per_type;
  std::int64_t n = 0;
  std::int64_t missing_predictions = 0;
};

// Tolerance t and maximum robustness limit m, 0 <= t < m <= 100.
struct RScoreParams {
  double t = 0.05;
  double m = 20.0;

  void validate() const;
};

struct RobustnessResult {
  double rscore = 0.0;
  std::array<double, 7> diffs{};  // per-partition |clean - noisy|
  RScoreParams params;
};

/// Lowercase, strip punctuation and collapse whitespace exactly like question
/// normalization, then re-join with spaces. Answers that normalize to nothing
/// become the empty string.
std::string normalize_answer(const std::string& raw);

/// Consensus accuracy of one prediction: min(matches/3, 1) over the answer
/// set, full credit at three agreeing annotators.
double question_accuracy(const Prediction& pred, const AnswerSet& gt);

/// Mean consensus accuracy (in percent) over every ground-truth question,
/// overall and per answer type. Questions without a prediction score 0 and
/// are counted in missing_predictions.
AccuracyReport evaluate(const std::vector<Prediction>& preds, const std::vector<AnswerSet>& gts);

/// |acc_clean - acc_noisy|, both in percent.
double acc_diff(double acc_clean, double acc_noisy);

/// clamp_0^1((sqrt(m) - sqrt(acc_di)) / (sqrt(m) - sqrt(t))): 1 at or below
/// the tolerance, 0 at or beyond the limit, a square-root ramp between.
double r_score(double acc_di, const RScoreParams& p);

/// Robustness of one model: the R_score of the first-partition accuracy
/// difference, with all seven per-partition diffs reported alongside.
RobustnessResult model_rscore(const AccuracyReport& clean,
                              const std::vector<AccuracyReport>& partition_reports,
                              const RScoreParams& p);

}  // namespace bqrobust::scoring
