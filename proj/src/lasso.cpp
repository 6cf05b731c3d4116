#include "bqrobust/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "bqrobust/errors.hpp"
#include "bqrobust/ranking.hpp"

namespace bqrobust::lasso {

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

struct Workspace {
  const Eigen::MatrixXd& columns;
  const Eigen::VectorXd& scale;      // 1 or ||a_j|| when solving on unit columns
  const Eigen::VectorXd& gram_diag;  // squared norms of the scaled columns
};

// One full cyclic pass; returns the largest coordinate change.
double cd_pass(const Workspace& w, const Eigen::VectorXd& b, double lambda, Eigen::VectorXd& y,
               Eigen::VectorXd& residual) {
  (void)b;
  double max_change = 0.0;
  for (Eigen::Index j = 0; j < w.columns.cols(); ++j) {
    const double rho = w.columns.col(j).dot(residual) / w.scale[j] + w.gram_diag[j] * y[j];
    const double y_new = soft_threshold(rho, lambda) / w.gram_diag[j];
    const double delta = y_new - y[j];
    if (delta != 0.0) {
      residual -= w.columns.col(j) * (delta / w.scale[j]);
      y[j] = y_new;
    }
    max_change = std::max(max_change, std::abs(delta));
  }
  return max_change;
}

// Max violation of the subgradient conditions at y for the scaled problem.
double kkt_violation(const Workspace& w, const Eigen::VectorXd& residual, double lambda,
                     const Eigen::VectorXd& y) {
  double kkt = 0.0;
  for (Eigen::Index j = 0; j < w.columns.cols(); ++j) {
    const double c = w.columns.col(j).dot(residual) / w.scale[j];
    if (y[j] == 0.0) {
      kkt = std::max(kkt, std::abs(c) - lambda);
    } else {
      kkt = std::max(kkt, std::abs(c - lambda * sign_of(y[j])));
    }
  }
  return std::max(kkt, 0.0);
}

// Active-set refinement for the rare instances where cyclic passes stall in a
// flat valley (typically supports larger than the embedding dimension): solve
// the sign-fixed quadratic on the active set exactly and line-search over the
// zero crossings, activating the worst violator between solves. Keeps the
// best iterate seen; returns whether the target was certified.
bool feature_sign_polish(const Workspace& w, const Eigen::VectorXd& b, double lambda,
                         double kkt_target, Eigen::VectorXd& y, Eigen::VectorXd& residual) {
  const Eigen::Index n = w.columns.cols();
  auto objective = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd r = b;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (v[j] != 0.0) r -= w.columns.col(j) * (v[j] / w.scale[j]);
    }
    return 0.5 * r.squaredNorm() + lambda * v.lpNorm<1>();
  };

  Eigen::VectorXd best = y;
  double best_obj = objective(y);

  for (int outer = 0; outer < 120; ++outer) {
    Eigen::VectorXd r = b;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (y[j] != 0.0) r -= w.columns.col(j) * (y[j] / w.scale[j]);
    }
    Eigen::Index activate = -1;
    double worst = kkt_target;
    bool optimal = true;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double c = w.columns.col(j).dot(r) / w.scale[j];
      const double v = y[j] == 0.0 ? std::abs(c) - lambda
                                   : std::abs(c - lambda * sign_of(y[j]));
      if (v > kkt_target) optimal = false;
      if (y[j] == 0.0 && v > worst) {
        worst = v;
        activate = j;
      }
    }
    if (optimal) {
      residual = r;
      return true;
    }

    std::vector<Eigen::Index> active;
    std::vector<double> theta;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (y[j] != 0.0) {
        active.push_back(j);
        theta.push_back(sign_of(y[j]));
      }
    }
    if (activate >= 0) {
      active.push_back(activate);
      theta.push_back(sign_of(w.columns.col(activate).dot(r) / w.scale[activate]));
    }

    for (int inner = 0; inner < 200 && !active.empty(); ++inner) {
      const auto m = static_cast<Eigen::Index>(active.size());
      Eigen::MatrixXd sub(w.columns.rows(), m);
      for (Eigen::Index i = 0; i < m; ++i) {
        sub.col(i) = w.columns.col(active[i]) / w.scale[active[i]];
      }
      Eigen::MatrixXd gram = sub.transpose() * sub;
      Eigen::VectorXd rhs = sub.transpose() * b;
      for (Eigen::Index i = 0; i < m; ++i) {
        rhs[i] -= lambda * theta[i];
      }
      // Tiny ridge keeps the solve defined when the support is degenerate.
      const double ridge = 1e-12 * (gram.trace() / static_cast<double>(m) + 1.0);
      gram.diagonal().array() += ridge;
      const Eigen::VectorXd z = gram.ldlt().solve(rhs);

      Eigen::VectorXd current(m);
      for (Eigen::Index i = 0; i < m; ++i) current[i] = y[active[i]];
      const Eigen::VectorXd direction = z - current;

      std::vector<double> steps = {1.0};
      for (Eigen::Index i = 0; i < m; ++i) {
        if (direction[i] != 0.0) {
          const double t = -current[i] / direction[i];
          if (t > 0.0 && t < 1.0) steps.push_back(t);
        }
      }
      double best_step = 1.0;
      double best_step_obj = std::numeric_limits<double>::infinity();
      Eigen::VectorXd candidate = y;
      for (double t : steps) {
        for (Eigen::Index i = 0; i < m; ++i) {
          candidate[active[i]] = current[i] + t * direction[i];
        }
        const double f = objective(candidate);
        if (f < best_step_obj) {
          best_step_obj = f;
          best_step = t;
        }
      }
      bool consistent = best_step == 1.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        double v = current[i] + best_step * direction[i];
        if (std::abs(v) < 1e-13) v = 0.0;
        if (consistent && v != 0.0 && sign_of(v) != theta[i]) consistent = false;
        y[active[i]] = v;
      }
      if (best_step_obj < best_obj) {
        best_obj = best_step_obj;
        best = y;
      }
      std::vector<Eigen::Index> next_active;
      std::vector<double> next_theta;
      for (Eigen::Index j : active) {
        if (y[j] != 0.0) {
          next_active.push_back(j);
          next_theta.push_back(sign_of(y[j]));
        }
      }
      active = std::move(next_active);
      theta = std::move(next_theta);
      if (consistent) break;
    }
  }

  y = best;
  residual = b;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (y[j] != 0.0) residual -= w.columns.col(j) * (y[j] / w.scale[j]);
  }
  return kkt_violation(w, residual, lambda, y) <= kkt_target;
}

}  // namespace

Dictionary Dictionary::build(Eigen::MatrixXd columns, std::vector<std::int64_t> question_ids) {
  if (columns.cols() == 0) {
    throw ContractViolation("Dictionary: at least one column required");
  }
  if (static_cast<std::size_t>(columns.cols()) != question_ids.size()) {
    throw DimensionMismatch("Dictionary: ids and columns differ in count");
  }
  std::unordered_set<std::int64_t> seen;
  for (auto id : question_ids) {
    if (!seen.insert(id).second) {
      throw DuplicateId("Dictionary: duplicate question_id " + std::to_string(id));
    }
  }
  Dictionary dict;
  dict.column_norms = columns.colwise().norm();
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    if (dict.column_norms[j] == 0.0) {
      throw ZeroColumn("Dictionary: column " + std::to_string(j) + " has zero norm");
    }
  }
  dict.columns = std::move(columns);
  dict.question_ids = std::move(question_ids);
  return dict;
}

double soft_threshold(double v, double threshold) {
  if (threshold < 0.0) {
    throw ContractViolation("soft_threshold: threshold must be >= 0");
  }
  if (v > threshold) return v - threshold;
  if (v < -threshold) return v + threshold;
  return 0.0;
}

LassoSolution solve(const Dictionary& dict, const Eigen::VectorXd& b, const SolverConfig& cfg) {
  const Eigen::Index n = dict.columns.cols();
  if (n == 0) {
    throw ContractViolation("solve: dictionary has no columns");
  }
  if (b.size() != dict.columns.rows()) {
    throw DimensionMismatch("solve: b has dimension " + std::to_string(b.size()) +
                            ", dictionary has " + std::to_string(dict.columns.rows()));
  }
  if (cfg.lambda < 0.0 || cfg.tol <= 0.0 || cfg.max_iter < 1) {
    throw ContractViolation("solve: invalid solver configuration");
  }

  Eigen::VectorXd norms = dict.columns.colwise().norm();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (norms[j] == 0.0) {
      throw ZeroColumn("solve: column " + std::to_string(j) + " has zero norm");
    }
  }
  Eigen::VectorXd scale = cfg.normalize_columns ? norms : Eigen::VectorXd::Ones(n).eval();
  Eigen::VectorXd gram_diag(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double s = norms[j] / scale[j];
    gram_diag[j] = s * s;
  }
  const Workspace w{dict.columns, scale, gram_diag};

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd residual = b;
  int total_passes = 0;

  // Continuation: warm the solution down a geometric lambda ladder. A cold
  // start directly at a tiny lambda leaves the mass spread across correlated
  // columns and cyclic passes then crawl toward the sparse optimum.
  double lambda_max = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    lambda_max = std::max(lambda_max, std::abs(dict.columns.col(j).dot(b)) / scale[j]);
  }
  if (cfg.lambda > 0.0 && cfg.lambda < lambda_max) {
    const int stages = 100;
    const double ratio = cfg.lambda / lambda_max;
    for (int s = 1; s < stages; ++s) {
      const double stage_lambda = lambda_max * std::pow(ratio, static_cast<double>(s) / stages);
      const double stage_tol = std::max(cfg.tol, 1e-3 * stage_lambda);
      for (int pass = 0; pass < 10; ++pass) {
        ++total_passes;
        if (cd_pass(w, b, stage_lambda, y, residual) < stage_tol) break;
      }
    }
  }

  // Final stage at the requested lambda: converged means the coordinate
  // updates are stable AND the subgradient conditions hold to 10*tol.
  const double kkt_target = 10.0 * cfg.tol;
  bool converged = false;
  int final_passes = 0;
  while (final_passes < cfg.max_iter) {
    const double max_change = cd_pass(w, b, cfg.lambda, y, residual);
    ++final_passes;
    ++total_passes;
    if (max_change < cfg.tol) {
      if (kkt_violation(w, residual, cfg.lambda, y) <= kkt_target) {
        converged = true;
        break;
      }
      // Stable but not optimal: a degenerate support froze the cyclic
      // updates. Hand over to the exact active-set refinement.
      if (cfg.lambda > 0.0 &&
          feature_sign_polish(w, b, cfg.lambda, kkt_target, y, residual)) {
        converged = true;
        break;
      }
    }
  }

  LassoSolution sol;
  sol.coefficients = y.cwiseQuotient(scale);
  sol.iterations = total_passes;
  sol.converged = converged;
  sol.kkt_residual = kkt_violation(w, residual, cfg.lambda, y);
  sol.objective = 0.5 * (b - dict.columns * sol.coefficients).squaredNorm() +
                  cfg.lambda * sol.coefficients.lpNorm<1>();
  return sol;
}

std::vector<ScoredId> rank_scores(const Dictionary& dict, const LassoSolution& solution, int k) {
  if (solution.coefficients.size() != dict.size()) {
    throw DimensionMismatch("rank_scores: solution does not match dictionary");
  }
  std::vector<ScoredId> scored(dict.size());
  for (int j = 0; j < dict.size(); ++j) {
    scored[j] = {dict.question_ids[j], solution.coefficients[j]};
  }
  return rank_top_k(std::move(scored), k);
}

}  // namespace bqrobust::lasso
