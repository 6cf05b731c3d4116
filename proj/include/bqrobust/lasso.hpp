#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "bqrobust/question.hpp"

namespace bqrobust::lasso {

// The candidate matrix A: one embedded basic question per column, with the
// corpus ids kept parallel.
struct Dictionary {
  Eigen::MatrixXd columns;  // dim x n
  std::vector<std::int64_t> question_ids;
  Eigen::VectorXd column_norms;

  int dim() const { return static_cast<int>(columns.rows()); }
  int size() const { return static_cast<int>(columns.cols()); }

  /// Validates id uniqueness and nonzero columns, caches column norms.
  static Dictionary build(Eigen::MatrixXd columns, std::vector<std::int64_t> question_ids);
};

struct SolverConfig {
  double lambda = 1e-6;  // l1 tradeoff
  double tol = 1e-8;     // max coordinate change per full pass
  int max_iter = 1000;   // full passes
  bool normalize_columns = false;
};

struct LassoSolution {
  Eigen::VectorXd coefficients;
  int iterations = 0;      // full passes across all continuation stages
  double objective = 0.0;  // 0.5*||A x - b||^2 + lambda*||x||_1 for the returned x
  bool converged = false;  // stable coordinates and kkt_residual within 10*tol
  double kkt_residual = 0.0;  // max subgradient violation on the solved problem
};

/// sign(v) * max(|v| - threshold, 0)
double soft_threshold(double v, double threshold);

/// Cyclic coordinate descent for min_x 0.5*||A x - b||^2 + lambda*||x||_1.
/// The solve warms the coefficients down a geometric lambda ladder from
/// lambda_max (where x = 0 is optimal) to cfg.lambda, then iterates full
/// passes at cfg.lambda until the largest coordinate change drops below
/// cfg.tol and the subgradient conditions hold to 10*cfg.tol, or cfg.max_iter
/// final-stage passes elapse. Degenerate supports that freeze the cyclic
/// updates are finished by an exact active-set refinement.
///
/// With cfg.normalize_columns the descent runs on unit-norm columns and the
/// returned coefficients are rescaled to the raw-column convention
/// (x_j = y_j / ||a_j||); objective is always reported for the returned
/// coefficients against the raw columns, while kkt_residual refers to the
/// problem actually solved.
LassoSolution solve(const Dictionary& dict, const Eigen::VectorXd& b, const SolverConfig& cfg);

/// Top-k candidates by coefficient. Positive coefficients rank first
/// (descending, ties by ascending question_id); non-positive ones fill any
/// remaining slots with score 0 in question_id order.
std::vector<ScoredId> rank_scores(const Dictionary& dict, const LassoSolution& solution, int k);

}  // namespace bqrobust::lasso
