#include "bqrobust/ranking.hpp"

#include <algorithm>

#include "bqrobust/errors.hpp"

namespace bqrobust {

std::vector<ScoredId> rank_top_k(std::vector<ScoredId> scored, int k) {
  if (k < 1) {
    throw ContractViolation("rank_top_k: k must be >= 1");
  }
  std::vector<ScoredId> positives;
  std::vector<ScoredId> rest;
  positives.reserve(scored.size());
  for (auto& s : scored) {
    (s.score > 0.0 ? positives : rest).push_back(s);
  }
  std::sort(positives.begin(), positives.end(), [](const ScoredId& a, const ScoredId& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.question_id < b.question_id;
  });
  std::sort(rest.begin(), rest.end(),
            [](const ScoredId& a, const ScoredId& b) { return a.question_id < b.question_id; });

  const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
  std::vector<ScoredId> out;
  out.reserve(want);
  for (std::size_t i = 0; i < positives.size() && out.size() < want; ++i) {
    out.push_back(positives[i]);
  }
  for (std::size_t i = 0; i < rest.size() && out.size() < want; ++i) {
    out.push_back({rest[i].question_id, 0.0});
  }
  return out;
}

}  // namespace bqrobust
