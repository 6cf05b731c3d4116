#include "bqrobust/textprep.hpp"

#include <string_view>
#include <unordered_set>

#include "bqrobust/errors.hpp"

namespace bqrobust::textprep {

namespace {

constexpr std::string_view kStripped = ".,?!;:\"'()[]";

bool is_stripped(char c) { return kStripped.find(c) != std::string_view::npos; }

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

}  // namespace

TokenSeq normalize(const std::string& text) {
  if (text.empty()) {
    throw ContractViolation("normalize: text must be non-empty");
  }
  TokenSeq tokens;
  std::string current;
  for (char c : text) {
    if (is_space(c)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else if (!is_stripped(c)) {
      current.push_back(ascii_lower(c));
    }
  }
  if (!current.empty()) {
    tokens.push_back(std::move(current));
  }
  if (tokens.empty()) {
    throw EmptyAfterNormalization("no tokens remain after normalization: \"" + text + "\"");
  }
  return tokens;
}

std::string join(const TokenSeq& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::vector<Question> dedup_pool(const std::vector<Question>& pool,
                                 const std::vector<Question>& main_questions) {
  std::unordered_set<std::string> mq_keys;
  mq_keys.reserve(main_questions.size());
  for (const auto& mq : main_questions) {
    mq_keys.insert(join(normalize(mq.text)));
  }
  std::vector<Question> result;
  result.reserve(pool.size());
  std::unordered_set<std::string> seen;
  seen.reserve(pool.size());
  for (const auto& q : pool) {
    std::string key = join(normalize(q.text));
    if (mq_keys.contains(key)) continue;
    if (!seen.insert(std::move(key)).second) continue;
    result.push_back(q);
  }
  return result;
}

std::unordered_map<std::string, std::int64_t> ngram_counts(const TokenSeq& seq, int n) {
  if (n < 1) {
    throw ContractViolation("ngram_counts: n must be >= 1");
  }
  std::unordered_map<std::string, std::int64_t> counts;
  if (seq.size() < static_cast<std::size_t>(n)) {
    return counts;
  }
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    std::string key = seq[i];
    for (int j = 1; j < n; ++j) {
      key.push_back(' ');
      key += seq[i + j];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace bqrobust::textprep
