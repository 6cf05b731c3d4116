#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bqrobust {

// One question of a VQA-style corpus.
struct Question {
  std::int64_t question_id = 0;
  std::int64_t image_id = 0;
  std::string text;

  bool operator==(const Question&) const = default;
};

// Normalized, lowercase word tokens. Tokens never contain whitespace and
// are never empty, so joining with single spaces is lossless.
using TokenSeq = std::vector<std::string>;

// One ranked candidate: its corpus id and similarity score.
struct ScoredId {
  std::int64_t question_id = 0;
  double score = 0.0;

  bool operator==(const ScoredId&) const = default;
};

}  // namespace bqrobust
