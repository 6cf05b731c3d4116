#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "bqrobust/question.hpp"

namespace bqrobust::textprep {

/// Lowercases ASCII letters, strips the punctuation set .,?!;:"'()[] and
/// splits on whitespace. Non-ASCII bytes pass through untouched.
/// Throws EmptyAfterNormalization when nothing survives.
TokenSeq normalize(const std::string& text);

/// Single-space join; the inverse of tokenization for normalized tokens.
std::string join(const TokenSeq& tokens);

/// Removes from `pool` every question whose normalized token sequence equals
/// that of any main question, then removes exact duplicates within the pool
/// (first occurrence wins). Comparison is on normalized tokens, not raw text.
std::vector<Question> dedup_pool(const std::vector<Question>& pool,
                                 const std::vector<Question>& main_questions);

/// Sliding-window n-grams with multiplicities, keyed by tokens joined with a
/// single space. Empty result when the sequence is shorter than n.
std::unordered_map<std::string, std::int64_t> ngram_counts(const TokenSeq& seq, int n);

}  // namespace bqrobust::textprep
