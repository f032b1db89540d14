#include "sacrc/error.hpp"
#include "sacrc/solvers.hpp"

#include <cmath>
#include <vector>

namespace sacrc {

namespace {

constexpr int kPowerIterations = 100;
constexpr double kPowerTolerance = 1e-6;

double soft_threshold(double v, double threshold) {
  if (v > threshold) return v - threshold;
  if (v < -threshold) return v + threshold;
  return 0.0;
}

// Gradient of the smooth part, 2 (G x - Phi^T y), given G x.
double optimality_from_gradient(const Vector& gradient, const Vector& alpha, double lambda1) {
  double worst = 0.0;
  for (Index j = 0; j < alpha.size(); ++j) {
    double violation;
    if (alpha(j) > 0.0) {
      violation = std::abs(gradient(j) + lambda1);
    } else if (alpha(j) < 0.0) {
      violation = std::abs(gradient(j) - lambda1);
    } else {
      violation = std::max(0.0, std::abs(gradient(j)) - lambda1);
    }
    worst = std::max(worst, violation);
  }
  return worst;
}

Representation as_sparse(Vector alpha) {
  std::vector<Index> support;
  for (Index j = 0; j < alpha.size(); ++j) {
    if (alpha(j) != 0.0) support.push_back(j);
  }
  const Index n = alpha.size();
  return Representation::sparse(std::move(alpha), std::move(support), n);
}

void check_lasso_inputs(const Dictionary& dictionary, const Vector& y, double lambda1) {
  if (y.size() != dictionary.rows()) {
    throw Error(Errc::kDimensionMismatch, "sample has " + std::to_string(y.size()) +
                                              " features, dictionary has " +
                                              std::to_string(dictionary.rows()));
  }
  if (!(lambda1 >= 0.0) || !std::isfinite(lambda1)) {
    throw Error(Errc::kInvalidArgument, "lambda1 must be finite and nonnegative");
  }
}

double power_iteration(const auto& apply, Index n) {
  Vector v = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double estimate = 0.0;
  for (int it = 0; it < kPowerIterations; ++it) {
    const Vector w = apply(v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const bool settled = std::abs(next - estimate) <= kPowerTolerance * std::abs(next);
    estimate = next;
    if (settled) break;
  }
  return estimate;
}

}  // namespace

double largest_gram_eigenvalue(const Dictionary& dictionary) {
  const Matrix& atoms = dictionary.atoms();
  return power_iteration([&](const Vector& v) -> Vector { return atoms.transpose() * (atoms * v); },
                         atoms.cols());
}

double lasso_objective(const Dictionary& dictionary, const Vector& y, const Vector& alpha,
                       double lambda1) {
  return (y - dictionary.atoms() * alpha).squaredNorm() + lambda1 * alpha.lpNorm<1>();
}

double lasso_optimality(const Dictionary& dictionary, const Vector& y, const Vector& alpha,
                        double lambda1) {
  const Matrix& atoms = dictionary.atoms();
  const Vector gradient = 2.0 * (atoms.transpose() * (atoms * alpha - y));
  return optimality_from_gradient(gradient, alpha, lambda1);
}

LassoSolver::LassoSolver(const Dictionary& dictionary)
    : dictionary_(&dictionary),
      owned_gram_(dictionary.atoms().transpose() * dictionary.atoms()),
      gram_(&owned_gram_),
      lipschitz_(2.0 * largest_gram_eigenvalue(dictionary)) {}

LassoSolver::LassoSolver(const Dictionary& dictionary, const Matrix& gram)
    : dictionary_(&dictionary), gram_(&gram), lipschitz_(2.0 * largest_gram_eigenvalue(dictionary)) {
  if (gram.rows() != dictionary.cols() || gram.cols() != dictionary.cols()) {
    throw Error(Errc::kDimensionMismatch, "Gram matrix must be N x N");
  }
}

LassoResult LassoSolver::solve(const Vector& y, double lambda1, const LassoOptions& options) const {
  check_lasso_inputs(*dictionary_, y, lambda1);
  const Matrix& gram = *gram_;
  const Index n = gram.rows();
  const Vector correlations = dictionary_->atoms().transpose() * y;
  const double y_norm2 = y.squaredNorm();

  // Objective through the Gram matrix: ||y||^2 - 2 b^T x + x^T G x + lambda1 |x|_1.
  auto objective = [&](const Vector& x, const Vector& gx) {
    return y_norm2 - 2.0 * correlations.dot(x) + x.dot(gx) + lambda1 * x.lpNorm<1>();
  };

  LassoResult result{Representation::dense(Vector::Zero(n))};
  if (lipschitz_ == 0.0) {
    result.code = as_sparse(Vector::Zero(n));
    result.converged = true;
    result.objective = y_norm2;
    return result;
  }

  const double step = 1.0 / lipschitz_;
  Vector x = Vector::Zero(n);
  Vector gx = Vector::Zero(n);
  Vector z = x;
  double t = 1.0;
  double current = objective(x, gx);
  Vector best = x;
  double best_objective = current;
  double optimality = optimality_from_gradient(-2.0 * correlations, x, lambda1);

  int it = 0;
  bool restarted = false;
  bool converged = optimality <= options.tol;
  while (!converged && it < options.max_iter) {
    ++it;
    const Vector gradient = 2.0 * (gram * z - correlations);
    Vector next(n);
    for (Index j = 0; j < n; ++j) next(j) = soft_threshold(z(j) - step * gradient(j), step * lambda1);
    Vector g_next = gram * next;
    const double value = objective(next, g_next);

    if (value > current && !restarted) {
      // Momentum overshot; restart from the last accepted point.
      z = x;
      t = 1.0;
      restarted = true;
      continue;
    }
    restarted = false;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next + ((t - 1.0) / t_next) * (next - x);
    t = t_next;
    x = std::move(next);
    gx = std::move(g_next);
    current = value;
    if (current <= best_objective) {
      best = x;
      best_objective = current;
    }
    optimality = optimality_from_gradient(2.0 * (gx - correlations), x, lambda1);
    converged = optimality <= options.tol;
  }

  if (converged) best = x;
  result.optimality = optimality_from_gradient(2.0 * (gram * best - correlations), best, lambda1);
  result.objective = lasso_objective(*dictionary_, y, best, lambda1);
  result.converged = result.optimality <= options.tol;
  result.iterations = it;
  result.code = as_sparse(std::move(best));
  return result;
}

LassoResult lasso_code(const Dictionary& dictionary, const Vector& y, double lambda1,
                       const LassoOptions& options) {
  check_lasso_inputs(dictionary, y, lambda1);
  return LassoSolver(dictionary).solve(y, lambda1, options);
}

}  // namespace sacrc
