#include "bqrobust/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "bqrobust/errors.hpp"
#include "bqrobust/textprep.hpp"

namespace bqrobust::scoring {

void RScoreParams::validate() const {
  if (!(0.0 <= t && t < m && m <= 100.0)) {
    throw ContractViolation("RScoreParams: need 0 <= t < m <= 100");
  }
}

std::string normalize_answer(const std::string& raw) {
  if (raw.empty()) return "";
  try {
    return textprep::join(textprep::normalize(raw));
  } catch (const EmptyAfterNormalization&) {
    return "";  // pure-punctuation answers compare as empty strings
  }
}

double question_accuracy(const Prediction& pred, const AnswerSet& gt) {
  if (pred.question_id != gt.question_id) {
    throw UnknownQuestion("question_accuracy: prediction for question_id " +
                          std::to_string(pred.question_id) + " scored against " +
                          std::to_string(gt.question_id));
  }
  if (gt.answers.size() < 3) {
    throw ContractViolation("question_accuracy: answer set needs at least 3 answers");
  }
  std::int64_t matches = 0;
  for (const auto& answer : gt.answers) {
    if (answer == pred.answer) ++matches;
  }
  return std::min(static_cast<double>(matches) / 3.0, 1.0);
}

AccuracyReport evaluate(const std::vector<Prediction>& preds, const std::vector<AnswerSet>& gts) {
  if (gts.empty()) {
    throw EmptyGroundTruth("evaluate: no ground-truth answer sets");
  }
  std::unordered_set<std::int64_t> gt_ids;
  gt_ids.reserve(gts.size());
  for (const auto& gt : gts) {
    if (!gt_ids.insert(gt.question_id).second) {
      throw DuplicateId("evaluate: duplicate ground-truth question_id " +
                        std::to_string(gt.question_id));
    }
  }
  std::unordered_map<std::int64_t, const Prediction*> by_id;
  by_id.reserve(preds.size());
  for (const auto& pred : preds) {
    if (!gt_ids.contains(pred.question_id)) {
      throw UnknownQuestion("evaluate: prediction for unknown question_id " +
                            std::to_string(pred.question_id));
    }
    if (!by_id.emplace(pred.question_id, &pred).second) {
      throw DuplicateId("evaluate: duplicate prediction for question_id " +
                        std::to_string(pred.question_id));
    }
  }

  AccuracyReport report;
  report.n = static_cast<std::int64_t>(gts.size());
  double total = 0.0;
  std::map<std::string, std::pair<double, std::int64_t>> per_type;  // sum, count
  for (const auto& gt : gts) {
    double score = 0.0;
    auto it = by_id.find(gt.question_id);
    if (it == by_id.end()) {
      ++report.missing_predictions;
    } else {
      score = question_accuracy(*it->second, gt);
    }
    total += score;
    auto& [sum, count] = per_type[gt.answer_type];
    sum += score;
    ++count;
  }
  report.overall = 100.0 * total / static_cast<double>(gts.size());
  for (const auto& [type, sum_count] : per_type) {
    report.per_type[type] = 100.0 * sum_count.first / static_cast<double>(sum_count.second);
  }
  return report;
}

double acc_diff(double acc_clean, double acc_noisy) {
  if (acc_clean < 0.0 || acc_clean > 100.0 || acc_noisy < 0.0 || acc_noisy > 100.0) {
    throw ContractViolation("acc_diff: accuracies must be in [0, 100]");
  }
  return std::abs(acc_clean - acc_noisy);
}

double r_score(double acc_di, const RScoreParams& p) {
  p.validate();
  if (acc_di < 0.0) {
    throw ContractViolation("r_score: accuracy difference must be >= 0");
  }
  const double value =
      (std::sqrt(p.m) - std::sqrt(acc_di)) / (std::sqrt(p.m) - std::sqrt(p.t));
  return std::max(0.0, std::min(1.0, value));
}

RobustnessResult model_rscore(const AccuracyReport& clean,
                              const std::vector<AccuracyReport>& partition_reports,
                              const RScoreParams& p) {
  if (partition_reports.size() != 7) {
    throw WrongPartitionCount("model_rscore: expected 7 partition reports, got " +
                              std::to_string(partition_reports.size()));
  }
  RobustnessResult result;
  result.params = p;
  for (std::size_t i = 0; i < 7; ++i) {
    result.diffs[i] = acc_diff(clean.overall, partition_reports[i].overall);
  }
  result.rscore = r_score(result.diffs[0], p);
  return result;
}

}  // namespace bqrobust::scoring
