#include "bqrobust/embedding.hpp"

#include <cmath>
#include <cstddef>

#include "bqrobust/errors.hpp"

namespace bqrobust::embedding {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* name) {
  if (!m.allFinite()) {
    throw DimensionMismatch(std::string("GruWeights: ") + name + " contains non-finite entries");
  }
}

// 64-bit FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in [-1, 1), fully specified so outputs do not depend on the
// standard library's distribution internals.
double unit_interval(std::uint64_t& state) {
  return 2.0 * (static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace

void GruWeights::validate() const {
  const int h = hidden_dim();
  const int e = embed_dim();
  if (h <= 0 || e <= 0) {
    throw DimensionMismatch("GruWeights: dimensions must be positive");
  }
  auto square = [&](const Eigen::MatrixXd& m, const char* name) {
    if (m.rows() != h || m.cols() != h) {
      throw DimensionMismatch(std::string("GruWeights: ") + name + " is not hidden x hidden");
    }
    require_finite(m, name);
  };
  auto input = [&](const Eigen::MatrixXd& m, const char* name) {
    if (m.rows() != h || m.cols() != e) {
      throw DimensionMismatch(std::string("GruWeights: ") + name + " is not hidden x embed");
    }
    require_finite(m, name);
  };
  square(u_r, "U_r");
  square(u_z, "U_z");
  square(u, "U");
  input(w_r, "W_r");
  input(w_z, "W_z");
  input(w, "W");
  if (unknown_vector.size() != e) {
    throw DimensionMismatch("GruWeights: unknown_vector dimension mismatch");
  }
  require_finite(unknown_vector, "unknown_vector");
  for (const auto& [token, vec] : word_vectors) {
    if (vec.size() != e) {
      throw DimensionMismatch("GruWeights: word vector for \"" + token + "\" has wrong dimension");
    }
    require_finite(vec, "word vector");
  }
}

GruState gru_step(const GruWeights& weights, const Eigen::VectorXd& h_prev,
                  const Eigen::VectorXd& x_t) {
  if (h_prev.size() != weights.hidden_dim()) {
    throw DimensionMismatch("gru_step: hidden state dimension mismatch");
  }
  if (x_t.size() != weights.embed_dim()) {
    throw DimensionMismatch("gru_step: input dimension mismatch");
  }
  if (!h_prev.allFinite()) {
    throw ContractViolation("gru_step: h_prev must be finite");
  }
  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };

  GruState s;
  s.r = (weights.u_r * h_prev + weights.w_r * x_t).unaryExpr(sigmoid);
  s.z = (weights.u_z * h_prev + weights.w_z * x_t).unaryExpr(sigmoid);
  s.h_bar = (weights.u * s.r.cwiseProduct(h_prev) + weights.w * x_t)
                .unaryExpr([](double v) { return std::tanh(v); });
  s.h = s.z.cwiseProduct(s.h_bar) + (Eigen::VectorXd::Ones(s.z.size()) - s.z).cwiseProduct(h_prev);
  return s;
}

EmbeddingVector encode_gru(const GruWeights& weights, const TokenSeq& seq) {
  if (seq.empty()) {
    throw EmptySequence("encode_gru: empty token sequence");
  }
  Eigen::VectorXd h = Eigen::VectorXd::Zero(weights.hidden_dim());
  for (const auto& token : seq) {
    auto it = weights.word_vectors.find(token);
    const Eigen::VectorXd& x = it != weights.word_vectors.end() ? it->second
                                                                : weights.unknown_vector;
    h = gru_step(weights, h, x).h;
  }
  return h;
}

EmbeddingVector encode_fallback(const TokenSeq& seq, int dim, std::uint64_t seed) {
  if (dim < 1) {
    throw ContractViolation("encode_fallback: dim must be >= 1");
  }
  if (seq.empty()) {
    throw EmptySequence("encode_fallback: empty token sequence");
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  for (std::size_t pos = 0; pos < seq.size(); ++pos) {
    const std::string& token = seq[pos];
    // Position folds into the hash so token order matters, not just counts.
    std::uint64_t state = fnv1a(token) ^ (seed * 0x2545f4914f6cdd1dULL + 0x9e3779b97f4a7c15ULL);
    state += 0xbf58476d1ce4e5b9ULL * static_cast<std::uint64_t>(pos + 1);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) {
      v[i] = unit_interval(state);
    }
    double norm = v.norm();
    if (norm == 0.0) {
      // A token hashing to the exact zero vector is out of reach for any
      // realistic dim; nudge deterministically rather than divide by zero.
      v[0] = 1.0;
      norm = 1.0;
    }
    sum += v / norm;
  }
  const double norm = sum.norm();
  if (norm == 0.0) {
    throw Error("encode_fallback: token vectors cancelled exactly");
  }
  return sum / norm;
}

GruEncoder::GruEncoder(GruWeights weights) : weights_(std::move(weights)) { weights_.validate(); }

EmbeddingVector GruEncoder::encode(const Question&, const TokenSeq& tokens) const {
  return encode_gru(weights_, tokens);
}

FallbackEncoder::FallbackEncoder(int dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim < 1) {
    throw ContractViolation("FallbackEncoder: dim must be >= 1");
  }
}

EmbeddingVector FallbackEncoder::encode(const Question&, const TokenSeq& tokens) const {
  return encode_fallback(tokens, dim_, seed_);
}

PrecomputedEncoder::PrecomputedEncoder(std::unordered_map<std::int64_t, EmbeddingVector> by_id)
    : by_id_(std::move(by_id)) {
  for (const auto& [id, vec] : by_id_) {
    if (dim_ == 0) {
      dim_ = static_cast<int>(vec.size());
    } else if (vec.size() != dim_) {
      throw DimensionMismatch("PrecomputedEncoder: inconsistent vector dimensions");
    }
  }
}

EmbeddingVector PrecomputedEncoder::encode(const Question& q, const TokenSeq&) const {
  auto it = by_id_.find(q.question_id);
  if (it == by_id_.end()) {
    throw UnknownQuestion("no precomputed embedding for question_id " +
                          std::to_string(q.question_id));
  }
  return it->second;
}

}  // namespace bqrobust::embedding
