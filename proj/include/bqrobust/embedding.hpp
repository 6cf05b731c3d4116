#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>

#include "bqrobust/question.hpp"

namespace bqrobust::embedding {

using EmbeddingVector = Eigen::VectorXd;

// GRU recurrence weights. No bias terms; the recurrence is
//   r = sigmoid(U_r h + W_r x), z = sigmoid(U_z h + W_z x),
//   h_bar = tanh(U (r .* h) + W x), h' = z .* h_bar + (1 - z) .* h.
struct GruWeights {
  Eigen::MatrixXd u_r, u_z, u;  // hidden_dim x hidden_dim
  Eigen::MatrixXd w_r, w_z, w;  // hidden_dim x embed_dim
  std::unordered_map<std::string, Eigen::VectorXd> word_vectors;
  Eigen::VectorXd unknown_vector;  // used for out-of-vocabulary tokens

  int hidden_dim() const { return static_cast<int>(u_r.rows()); }
  int embed_dim() const { return static_cast<int>(w_r.cols()); }

  /// Throws DimensionMismatch when any matrix or word vector is inconsistent
  /// with the declared dimensions, or when any entry is not finite.
  void validate() const;
};

struct GruState {
  Eigen::VectorXd h;      // next hidden state
  Eigen::VectorXd r;      // reset gate, entries in (0,1)
  Eigen::VectorXd z;      // update gate, entries in (0,1)
  Eigen::VectorXd h_bar;  // candidate state
};

/// One step of the recurrence above.
GruState gru_step(const GruWeights& weights, const Eigen::VectorXd& h_prev,
                  const Eigen::VectorXd& x_t);

/// Runs the recurrence over the sequence from h = 0; the final hidden state
/// is the sentence embedding. Unknown tokens use weights.unknown_vector.
EmbeddingVector encode_gru(const GruWeights& weights, const TokenSeq& seq);

/// Deterministic hash-based encoder for desk-scale runs and tests: each token
/// is hashed together with its position and the seed to a pseudorandom unit
/// vector (stable across platforms), and the sum is L2-normalized. Sensitive
/// to token order and multiplicity.
EmbeddingVector encode_fallback(const TokenSeq& seq, int dim, std::uint64_t seed);

// Uniform interface over the three ways questions become vectors.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual EmbeddingVector encode(const Question& q, const TokenSeq& tokens) const = 0;
  virtual int dim() const = 0;
};

class GruEncoder final : public Encoder {
 public:
  explicit GruEncoder(GruWeights weights);
  EmbeddingVector encode(const Question& q, const TokenSeq& tokens) const override;
  int dim() const override { return weights_.hidden_dim(); }
  const GruWeights& weights() const { return weights_; }

 private:
  GruWeights weights_;
};

class FallbackEncoder final : public Encoder {
 public:
  FallbackEncoder(int dim, std::uint64_t seed);
  EmbeddingVector encode(const Question& q, const TokenSeq& tokens) const override;
  int dim() const override { return dim_; }

 private:
  int dim_;
  std::uint64_t seed_;
};

// Serves vectors precomputed elsewhere, keyed by question_id.
class PrecomputedEncoder final : public Encoder {
 public:
  explicit PrecomputedEncoder(std::unordered_map<std::int64_t, EmbeddingVector> by_id);
  EmbeddingVector encode(const Question& q, const TokenSeq& tokens) const override;
  int dim() const override { return dim_; }

 private:
  std::unordered_map<std::int64_t, EmbeddingVector> by_id_;
  int dim_ = 0;
};

}  // namespace bqrobust::embedding
