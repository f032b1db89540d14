#pragma once

#include "sacrc/model.hpp"

#include <vector>

namespace sacrc {

// ---------------------------------------------------------------------------
// Regularized least squares

/// P = (Phi^T Phi + lambda I)^-1 Phi^T, computed once per model.
class RidgeProjection {
 public:
  const Matrix& matrix() const noexcept { return matrix_; }
  double lambda() const noexcept { return lambda_; }
  const Matrix& gram() const noexcept { return gram_; }

 private:
  friend RidgeProjection build_projection(const Dictionary&, double);
  RidgeProjection(Matrix matrix, Matrix gram, double lambda)
      : matrix_(std::move(matrix)), gram_(std::move(gram)), lambda_(lambda) {}

  Matrix matrix_;
  Matrix gram_;
  double lambda_;
};

/// Solves the normal equations through a Cholesky factorization of
/// Phi^T Phi + lambda I. With lambda = 0 a singular (or numerically
/// singular, reciprocal condition below N * eps) Gram matrix raises
/// SingularGram; there is no pseudo-inverse fallback.
RidgeProjection build_projection(const Dictionary& dictionary, double lambda);

/// alpha = P y, the minimizer of ||y - Phi a||^2 + lambda ||a||^2.
Representation rls_code(const RidgeProjection& projection, const Vector& y);
Representation rls_code(const FittedModel& model, const Vector& y);

/// Minimum-norm least-squares operator pinv(Phi), used by the plain
/// residual classifier when Phi^T Phi is singular.
Matrix least_squares_operator(const Dictionary& dictionary);

/// Dictionary + projection + Gram matrix + label matrix in one object.
FittedModel make_model(Dictionary dictionary, double lambda, Index k);

// ---------------------------------------------------------------------------
// Orthogonal matching pursuit

struct PursuitTrace {
  std::vector<Index> selected_atoms;
  /// residual_norms[0] = ||y||, then one entry per selected atom.
  std::vector<double> residual_norms;
};

struct PursuitResult {
  Representation code;
  PursuitTrace trace;
  /// y had no measurable correlation with any atom (including y = 0); the
  /// code is zero and the support empty.
  bool degenerate = false;
};

/// Stopping and tie rules shared by both OMP implementations. All
/// thresholds are relative to ||y|| so that coding c*y reproduces the same
/// atom sequence as coding y.
struct PursuitTolerances {
  /// Stop once ||r|| < residual * ||y||.
  double residual = 1e-10;
  /// Correlations within tie * ||y|| of the maximum go to the lowest index.
  double tie = 1e-12;
  /// max |Phi^T r| <= orthogonal * ||y|| means r is orthogonal to every atom.
  double orthogonal = 1e-12;
};

/// Greedy pursuit that recomputes Phi^T r each step and refits the selected
/// atoms with a Householder QR. Selection maximizes |<phi_j, r>|.
PursuitResult omp(const Dictionary& dictionary, const Vector& y, Index k,
                  const PursuitTolerances& tol = {});

/// Batch variant driven by the Gram matrix: correlations are updated as
/// Phi^T y - G_I gamma and the selected block G_II is factored by
/// incremental Cholesky. Matches omp() to 1e-8.
class GramPursuit {
 public:
  explicit GramPursuit(const Dictionary& dictionary);
  /// Reuses a Gram matrix computed elsewhere, e.g. by make_model.
  GramPursuit(const Dictionary& dictionary, const Matrix& gram);
  GramPursuit(const GramPursuit&) = delete;
  GramPursuit& operator=(const GramPursuit&) = delete;

  PursuitResult code(const Vector& y, Index k, const PursuitTolerances& tol = {}) const;
  /// Same as code() for every column of `samples`, with Phi^T Y formed in one product.
  std::vector<PursuitResult> code_batch(const Matrix& samples, Index k,
                                        const PursuitTolerances& tol = {}) const;

 private:
  PursuitResult code_from_correlations(const Vector& y, Vector initial, Index k,
                                       const PursuitTolerances& tol) const;

  const Dictionary* dictionary_;
  Matrix owned_gram_;
  const Matrix* gram_;
};

// ---------------------------------------------------------------------------
// l1-regularized coding (SRC baseline)

struct LassoOptions {
  /// Target for the subgradient optimality residual.
  double tol = 1e-8;
  int max_iter = 20000;
};

struct LassoResult {
  Representation code;
  bool converged = false;
  int iterations = 0;
  /// max_j of the distance from -grad_j to lambda1 * subdiff|a_j|.
  double optimality = 0.0;
  double objective = 0.0;
};

/// Largest eigenvalue of Phi^T Phi by power iteration (at most 100 steps,
/// stopping once the Rayleigh quotient moves by less than 1e-6 relative).
double largest_gram_eigenvalue(const Dictionary& dictionary);

/// ||y - Phi a||^2 + lambda1 ||a||_1.
double lasso_objective(const Dictionary& dictionary, const Vector& y, const Vector& alpha,
                       double lambda1);

/// Subgradient optimality residual of `alpha` for the objective above.
double lasso_optimality(const Dictionary& dictionary, const Vector& y, const Vector& alpha,
                        double lambda1);

/// Accelerated iterative shrinkage-thresholding with constant step 1/L,
/// L = 2 * lambda_max(Phi^T Phi), and momentum restart whenever the
/// objective increases. Hitting max_iter is not an error: the best iterate
/// is returned with converged = false.
LassoResult lasso_code(const Dictionary& dictionary, const Vector& y, double lambda1,
                       const LassoOptions& options = {});

/// lasso_code with the Gram matrix and step size computed once, for coding
/// many samples against one dictionary.
class LassoSolver {
 public:
  explicit LassoSolver(const Dictionary& dictionary);
  LassoSolver(const Dictionary& dictionary, const Matrix& gram);
  LassoSolver(const LassoSolver&) = delete;
  LassoSolver& operator=(const LassoSolver&) = delete;

  LassoResult solve(const Vector& y, double lambda1, const LassoOptions& options = {}) const;
  double lipschitz() const noexcept { return lipschitz_; }

 private:
  const Dictionary* dictionary_;
  Matrix owned_gram_;
  const Matrix* gram_;
  double lipschitz_;
};

}  // namespace sacrc
