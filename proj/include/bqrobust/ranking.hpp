#pragma once

#include <vector>

#include "bqrobust/question.hpp"

namespace bqrobust {

/// Shared top-k semantics for every ranker: entries with positive score are
/// sorted descending (ties by ascending question_id); if fewer than k are
/// positive, the remaining slots are filled with zero-score entries in
/// question_id order. Output length is min(k, scored.size()).
std::vector<ScoredId> rank_top_k(std::vector<ScoredId> scored, int k);

}  // namespace bqrobust
