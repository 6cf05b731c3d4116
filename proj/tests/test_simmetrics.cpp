#include <doctest.h>

#include <cmath>
#include <random>

#include "bqrobust/errors.hpp"
#include "bqrobust/simmetrics.hpp"
#include "oracles.hpp"

using namespace bqrobust;
using namespace bqrobust::simmetrics;

namespace {

TokenSeq random_seq(std::mt19937& rng, const std::vector<std::string>& vocab, int max_len) {
  TokenSeq seq;
  const int len = 1 + static_cast<int>(rng() % max_len);
  for (int i = 0; i < len; ++i) seq.push_back(vocab[rng() % vocab.size()]);
  return seq;
}

}  // namespace

TEST_CASE("bleu hand fixtures") {
  CHECK(bleu({"a", "b", "c"}, {"a", "b", "c"}, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bleu({"a", "b", "c"}, {"a", "b", "c"}, 3) == doctest::Approx(1.0).epsilon(1e-12));
  // Clipping: "the" appears once in the reference, so 3 candidate copies give 1/3.
  CHECK(bleu({"the", "the", "the"}, {"the", "cat"}, 1) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // Brevity penalty: all unigrams match but c=2 against r=4.
  CHECK(bleu({"a", "b"}, {"a", "b", "c", "d"}, 1) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // p1 = 2/3, p2 = 1/2, same lengths: geometric mean sqrt(1/3).
  CHECK(bleu({"a", "b", "c"}, {"a", "b", "d"}, 2) ==
        doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
  CHECK(bleu({"x"}, {"y"}, 1) == 0.0);
  // Unigrams all match but no bigram does; unsmoothed zero.
  CHECK(bleu({"a", "b"}, {"b", "a"}, 2) == 0.0);
  CHECK(bleu({"cat", "cat", "dog"}, {"cat", "dog"}, 1) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(bleu({"a", "b", "c", "d"}, {"a", "b", "c"}, 4) == 0.0);
  // Candidate too short to have any 4-gram.
  CHECK(bleu({"a", "b"}, {"a", "b"}, 4) == 0.0);
  CHECK(bleu({"how", "old", "is", "the", "car"}, {"how", "old", "is", "the", "truck"}, 2) ==
        doctest::Approx(std::sqrt(0.8 * 0.75)).epsilon(1e-12));
}

TEST_CASE("bleu contract") {
  CHECK_THROWS_AS(bleu({}, {"a"}, 1), ContractViolation);
  CHECK_THROWS_AS(bleu({"a"}, {}, 1), ContractViolation);
  CHECK_THROWS_AS(bleu({"a"}, {"a"}, 0), ContractViolation);
  CHECK_THROWS_AS(bleu({"a"}, {"a"}, 5), ContractViolation);
}

TEST_CASE("adding a matching token never lowers unigram precision") {
  std::mt19937 rng(13);
  const std::vector<std::string> vocab = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 100; ++trial) {
    const TokenSeq r = random_seq(rng, vocab, 6);
    TokenSeq c = random_seq(rng, vocab, 5);
    // Appending a reference token with clip budget left cannot lower p1.
    std::unordered_map<std::string, int> budget;
    for (const auto& t : r) ++budget[t];
    for (const auto& t : c) --budget[t];
    std::string spare;
    for (const auto& [token, left] : budget) {
      if (left > 0) {
        spare = token;
        break;
      }
    }
    if (spare.empty()) continue;
    const double before = bleu(c, r, 1);
    c.push_back(spare);
    CHECK(bleu(c, r, 1) >= before - 1e-12);
  }
}

TEST_CASE("rouge_l hand fixtures") {
  const double b2 = 1.2 * 1.2;
  CHECK(rouge_l({"a", "b", "c"}, {"a", "b", "c"}) == doctest::Approx(1.0).epsilon(1e-12));
  // LCS=2: R=2/3, P=1.
  CHECK(rouge_l({"the", "cat"}, {"the", "cat", "sat"}) ==
        doctest::Approx((1.0 + b2) * 1.0 * (2.0 / 3.0) / ((2.0 / 3.0) + b2 * 1.0))
            .epsilon(1e-12));
  CHECK(rouge_l({"x", "y"}, {"p", "q"}) == 0.0);
  // LCS=2 with a gap in the candidate: P=2/3, R=1.
  CHECK(rouge_l({"a", "x", "b"}, {"a", "b"}) ==
        doctest::Approx((1.0 + b2) * (2.0 / 3.0) * 1.0 / (1.0 + b2 * (2.0 / 3.0)))
            .epsilon(1e-12));
  // beta=1 turns F into the harmonic mean.
  CHECK(rouge_l({"a", "b"}, {"a", "c"}, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  // When P == R the F-measure collapses to that value for any beta.
  CHECK(rouge_l({"b", "a"}, {"a", "b"}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rouge_l({"a", "b", "c", "d"}, {"b", "d"}) ==
        doctest::Approx((1.0 + b2) * 0.5 * 1.0 / (1.0 + b2 * 0.5)).epsilon(1e-12));
  CHECK(rouge_l({"a"}, {"a", "a", "a"}) ==
        doctest::Approx((1.0 + b2) * 1.0 * (1.0 / 3.0) / ((1.0 / 3.0) + b2)).epsilon(1e-12));
  CHECK(rouge_l({"a", "a"}, {"a"}) ==
        doctest::Approx((1.0 + b2) * 0.5 * 1.0 / (1.0 + b2 * 0.5)).epsilon(1e-12));
  CHECK(rouge_l({"w", "x", "y", "z"}, {"w", "y", "z", "q"}) ==
        doctest::Approx(0.75).epsilon(1e-12));
  CHECK_THROWS_AS(rouge_l({"a"}, {"a"}, 0.0), ContractViolation);
}

TEST_CASE("rouge_l agrees with brute-force LCS enumeration") {
  std::mt19937 rng(17);
  const std::vector<std::string> vocab = {"a", "b", "c"};
  const double b2 = 1.2 * 1.2;
  for (int trial = 0; trial < 100; ++trial) {
    const TokenSeq c = random_seq(rng, vocab, 8);
    const TokenSeq r = random_seq(rng, vocab, 8);
    const double lcs = static_cast<double>(oracles::lcs_brute_force(c, r));
    double expected = 0.0;
    if (lcs > 0.0) {
      const double recall = lcs / r.size();
      const double precision = lcs / c.size();
      expected = (1.0 + b2) * precision * recall / (recall + b2 * precision);
    }
    CHECK(rouge_l(c, r) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("idf table") {
  const std::vector<TokenSeq> docs = {{"the", "cat"}, {"the", "dog"}, {"a", "bird"}};
  const IdfTable idf = IdfTable::build(docs);
  CHECK(idf.doc_count == 3);
  CHECK(idf.ngram_doc_freq.at("the") == 2);
  CHECK(idf.ngram_doc_freq.at("cat") == 1);
  CHECK(idf.ngram_doc_freq.at("the cat") == 1);
  CHECK(idf.idf("the") == doctest::Approx(std::log(1.5)).epsilon(1e-12));
  CHECK(idf.idf("cat") == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(idf.idf("never seen") == 0.0);
}

TEST_CASE("cider fixtures on a three-document corpus") {
  const std::vector<TokenSeq> docs = {{"the", "cat"}, {"the", "dog"}, {"a", "bird"}};
  const IdfTable idf = IdfTable::build(docs);

  // Identity with positive idf everywhere: cosine 1 at both live orders.
  CHECK(cider({"the", "cat"}, {"the", "cat"}, idf) == doctest::Approx(1.0).epsilon(1e-12));

  // Shared "the" at order 1, nothing at order 2.
  const double l15 = std::log(1.5);
  const double l3 = std::log(3.0);
  CHECK(cider({"the", "cat"}, {"the", "dog"}, idf) ==
        doctest::Approx(0.5 * l15 * l15 / (l15 * l15 + l3 * l3)).epsilon(1e-12));

  CHECK(cider({"a", "bird"}, {"the", "cat"}, idf) == 0.0);
  CHECK(cider({"the", "cat"}, {"a", "bird"}, idf) == 0.0);

  // A gram in every document has idf 0 and carries no signal.
  CHECK(cider({"zebra"}, {"zebra"}, idf) == 0.0);

  IdfTable empty;
  CHECK_THROWS_AS(cider({"a"}, {"a"}, empty), EmptyIdf);
}

TEST_CASE("cider agrees with the independent tf-idf cosine oracle") {
  std::mt19937 rng(23);
  const std::vector<std::string> vocab = {"the", "cat", "dog", "sat", "on", "mat"};
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<TokenSeq> corpus;
    const int docs = 2 + static_cast<int>(rng() % 4);
    for (int d = 0; d < docs; ++d) corpus.push_back(random_seq(rng, vocab, 6));
    const TokenSeq c = random_seq(rng, vocab, 6);
    const TokenSeq r = random_seq(rng, vocab, 6);
    const IdfTable idf = IdfTable::build(corpus);
    CHECK(cider(c, r, idf) ==
          doctest::Approx(oracles::tfidf_cosine_oracle(c, r, corpus)).epsilon(1e-12));
  }
}

TEST_CASE("meteor hand fixtures") {
  // Identical five tokens: one chunk, tiny fragmentation penalty.
  CHECK(meteor({"v", "w", "x", "y", "z"}, {"v", "w", "x", "y", "z"}) ==
        doctest::Approx(1.0 - 0.5 * std::pow(1.0 / 5.0, 3.0)).epsilon(1e-12));
  // A single identical token is one chunk over one match: penalty 0.5.
  CHECK(meteor({"a"}, {"a"}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(meteor({"x", "y"}, {"p", "q"}) == 0.0);
  // Swapped order: two chunks over two matches wipes half the F-mean.
  CHECK(meteor({"a", "b"}, {"b", "a"}) == doctest::Approx(0.5).epsilon(1e-12));
  {
    // P=2/3, R=1, one chunk of two matches.
    const double f = 10.0 * (2.0 / 3.0) * 1.0 / (1.0 + 9.0 * (2.0 / 3.0));
    CHECK(meteor({"the", "cat", "sat"}, {"the", "cat"}) ==
          doctest::Approx(f * (1.0 - 0.5 * std::pow(1.0 / 2.0, 3.0))).epsilon(1e-12));
  }
  {
    // P=1, R=2/3, but the reference gap splits the alignment into two chunks.
    const double f = 10.0 * 1.0 * (2.0 / 3.0) / ((2.0 / 3.0) + 9.0);
    CHECK(meteor({"the", "cat"}, {"the", "dog", "cat"}) ==
          doctest::Approx(f * 0.5).epsilon(1e-12));
  }
  {
    // Repetition clips to one match.
    const double f = 10.0 * 0.5 * 1.0 / (1.0 + 9.0 * 0.5);
    CHECK(meteor({"a", "a"}, {"a"}) == doctest::Approx(f * 0.5).epsilon(1e-12));
  }
  {
    // Minimal chunking must find {a}, {b c}: two chunks over three matches.
    const double f = 10.0 * 1.0 * 0.75 / (0.75 + 9.0);
    CHECK(meteor({"a", "b", "c"}, {"a", "x", "b", "c"}) ==
          doctest::Approx(f * (1.0 - 0.5 * std::pow(2.0 / 3.0, 3.0))).epsilon(1e-12));
  }
  // The identity alignment is optimal even with repeated words.
  CHECK(meteor({"a", "b", "a"}, {"a", "b", "a"}) ==
        doctest::Approx(1.0 - 0.5 * std::pow(1.0 / 3.0, 3.0)).epsilon(1e-12));
  {
    // Best alignment skips the leading b: matches (a,b) in one chunk.
    const double f = 10.0 * (2.0 / 3.0) * 1.0 / (1.0 + 9.0 * (2.0 / 3.0));
    CHECK(meteor({"b", "a", "b"}, {"a", "b"}) ==
          doctest::Approx(f * (1.0 - 0.5 * std::pow(1.0 / 2.0, 3.0))).epsilon(1e-12));
  }
}

TEST_CASE("identity scores are maximal") {
  std::mt19937 rng(29);
  const std::vector<std::string> vocab = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 80; ++trial) {
    const TokenSeq r = random_seq(rng, vocab, 6);
    const TokenSeq c = random_seq(rng, vocab, 6);
    CHECK(bleu(r, r, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rouge_l(r, r) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bleu(c, r, 1) <= 1.0 + 1e-12);
    CHECK(rouge_l(c, r) <= 1.0 + 1e-12);
    CHECK(meteor(c, r) <= meteor(r, r) + 1e-12);
    CHECK(meteor(c, r) >= 0.0);
    CHECK(meteor(c, r) <= 1.0);
  }
}

TEST_CASE("rank_by_metric") {
  const std::vector<PoolEntry> pool = {
      {1, {"how", "old", "is", "the", "truck"}},
      {2, {"what", "color", "is", "the", "car"}},
      {3, {"how", "old", "is", "the", "car"}},  // identical to the MQ
      {4, {"is", "it", "raining"}},
      {5, {"how", "old", "is", "this", "car"}},
  };
  const TokenSeq mq = {"how", "old", "is", "the", "car"};

  SUBCASE("identity ranks first at the metric maximum") {
    for (MetricKind kind : {MetricKind::bleu1, MetricKind::bleu2, MetricKind::bleu3,
                            MetricKind::bleu4, MetricKind::rouge, MetricKind::meteor}) {
      const auto ranked = rank_by_metric(pool, mq, kind, 5);
      REQUIRE(!ranked.empty());
      CHECK(ranked[0].question_id == 3);
      for (std::size_t i = 1; i < ranked.size(); ++i) {
        CHECK(ranked[0].score >= ranked[i].score);
      }
    }
    std::vector<TokenSeq> docs;
    for (const auto& e : pool) docs.push_back(e.tokens);
    docs.push_back(mq);
    const IdfTable idf = IdfTable::build(docs);
    const auto ranked = rank_by_metric(pool, mq, MetricKind::cider, 5, &idf);
    CHECK(ranked[0].question_id == 3);
  }

  SUBCASE("k larger than the pool returns the whole pool") {
    CHECK(rank_by_metric(pool, mq, MetricKind::bleu1, 50).size() == pool.size());
  }

  SUBCASE("ordering equals exhaustive scoring") {
    const auto ranked = rank_by_metric(pool, mq, MetricKind::bleu1, 5);
    std::vector<ScoredId> brute;
    for (const auto& entry : pool) {
      brute.push_back({entry.question_id, bleu(entry.tokens, mq, 1)});
    }
    std::sort(brute.begin(), brute.end(), [](const ScoredId& a, const ScoredId& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.question_id < b.question_id;
    });
    REQUIRE(ranked.size() == brute.size());
    for (std::size_t i = 0; i < brute.size(); ++i) {
      // Zero-score entries keep id order, which the plain sort already gives.
      CHECK(ranked[i].question_id == brute[i].question_id);
      CHECK(ranked[i].score == doctest::Approx(brute[i].score).epsilon(1e-12));
    }
  }

  SUBCASE("error paths") {
    CHECK_THROWS_AS(rank_by_metric(pool, mq, MetricKind::cider, 3), MissingIdf);
    CHECK_THROWS_AS(rank_by_metric(pool, mq, MetricKind::lasso, 3), ContractViolation);
  }
}

TEST_CASE("metric name round trip") {
  for (const char* name : {"bleu1", "bleu2", "bleu3", "bleu4", "rouge", "cider", "meteor",
                           "lasso"}) {
    CHECK(metric_to_string(metric_from_string(name)) == name);
  }
  CHECK_THROWS_AS(metric_from_string("bleu5"), ContractViolation);
}
