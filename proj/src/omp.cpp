#include "sacrc/error.hpp"
#include "sacrc/solvers.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <optional>

namespace sacrc {

namespace {

void check_inputs(const Dictionary& dictionary, const Vector& y, Index k) {
  if (y.size() != dictionary.rows()) {
    throw Error(Errc::kDimensionMismatch, "sample has " + std::to_string(y.size()) +
                                              " features, dictionary has " +
                                              std::to_string(dictionary.rows()));
  }
  if (k < 1 || k > dictionary.cols()) {
    throw Error(Errc::kInvalidSparsity,
                "k = " + std::to_string(k) + " outside [1, " + std::to_string(dictionary.cols()) + "]");
  }
}

// Lowest unselected index whose |correlation| is within `tie` of the largest
// one. Nothing is returned when every correlation is at or below `floor`.
std::optional<Index> select_atom(const Vector& correlations, const std::vector<char>& selected,
                                 double tie, double floor) {
  double best = -1.0;
  for (Index j = 0; j < correlations.size(); ++j) {
    if (!selected[static_cast<std::size_t>(j)]) best = std::max(best, std::abs(correlations(j)));
  }
  if (!(best > floor)) return std::nullopt;
  for (Index j = 0; j < correlations.size(); ++j) {
    if (!selected[static_cast<std::size_t>(j)] && std::abs(correlations(j)) >= best - tie) return j;
  }
  return std::nullopt;
}

PursuitResult finish(Index n_atoms, Index k, const std::vector<Index>& support, const Vector& gamma,
                     PursuitTrace trace) {
  Vector coefficients = Vector::Zero(n_atoms);
  for (std::size_t i = 0; i < support.size(); ++i) {
    coefficients(support[i]) = gamma(static_cast<Index>(i));
  }
  const bool degenerate = support.empty();
  return PursuitResult{Representation::sparse(std::move(coefficients), support, k), std::move(trace),
                       degenerate};
}

}  // namespace

PursuitResult omp(const Dictionary& dictionary, const Vector& y, Index k,
                  const PursuitTolerances& tol) {
  check_inputs(dictionary, y, k);
  const Matrix& atoms = dictionary.atoms();
  const double y_norm = y.norm();

  PursuitTrace trace;
  trace.residual_norms.push_back(y_norm);
  std::vector<char> selected(static_cast<std::size_t>(atoms.cols()), 0);
  std::vector<Index> support;
  Vector gamma;
  Vector residual = y;
  double residual_norm = y_norm;

  while (static_cast<Index>(support.size()) < k) {
    if (!(residual_norm >= tol.residual * y_norm) || y_norm == 0.0) break;
    const Vector correlations = atoms.transpose() * residual;
    const auto next = select_atom(correlations, selected, tol.tie * y_norm, tol.orthogonal * y_norm);
    if (!next) break;

    selected[static_cast<std::size_t>(*next)] = 1;
    support.push_back(*next);
    trace.selected_atoms.push_back(*next);

    Matrix chosen(atoms.rows(), static_cast<Index>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i) chosen.col(static_cast<Index>(i)) = atoms.col(support[i]);
    gamma = chosen.householderQr().solve(y);
    residual = y - chosen * gamma;
    residual_norm = residual.norm();
    trace.residual_norms.push_back(residual_norm);
  }
  return finish(atoms.cols(), k, support, gamma, std::move(trace));
}

GramPursuit::GramPursuit(const Dictionary& dictionary)
    : dictionary_(&dictionary),
      owned_gram_(dictionary.atoms().transpose() * dictionary.atoms()),
      gram_(&owned_gram_) {}

GramPursuit::GramPursuit(const Dictionary& dictionary, const Matrix& gram)
    : dictionary_(&dictionary), gram_(&gram) {
  if (gram.rows() != dictionary.cols() || gram.cols() != dictionary.cols()) {
    throw Error(Errc::kDimensionMismatch, "Gram matrix must be N x N");
  }
}

PursuitResult GramPursuit::code(const Vector& y, Index k, const PursuitTolerances& tol) const {
  check_inputs(*dictionary_, y, k);
  return code_from_correlations(y, dictionary_->atoms().transpose() * y, k, tol);
}

std::vector<PursuitResult> GramPursuit::code_batch(const Matrix& samples, Index k,
                                                   const PursuitTolerances& tol) const {
  if (samples.rows() != dictionary_->rows()) {
    throw Error(Errc::kDimensionMismatch, "samples have the wrong feature dimension");
  }
  if (samples.cols() > 0) check_inputs(*dictionary_, samples.col(0), k);
  const Matrix correlations = dictionary_->atoms().transpose() * samples;
  std::vector<PursuitResult> results;
  results.reserve(static_cast<std::size_t>(samples.cols()));
  for (Index s = 0; s < samples.cols(); ++s) {
    results.push_back(code_from_correlations(samples.col(s), correlations.col(s), k, tol));
  }
  return results;
}

PursuitResult GramPursuit::code_from_correlations(const Vector& y, Vector initial, Index k,
                                                  const PursuitTolerances& tol) const {
  const Matrix& gram = *gram_;
  const Matrix& atoms = dictionary_->atoms();
  const Index n_atoms = atoms.cols();
  const double y_norm = y.norm();
  const double y_norm2 = y_norm * y_norm;

  PursuitTrace trace;
  trace.residual_norms.push_back(y_norm);
  std::vector<char> selected(static_cast<std::size_t>(n_atoms), 0);
  std::vector<Index> support;
  Vector correlations = initial;
  Vector initial_on_support(k);
  Matrix chol = Matrix::Zero(k, k);  // lower factor of G_II
  // G_{:,I}, filled as atoms are selected. Reused across calls on a thread:
  // at N x k it is large enough that a fresh allocation costs page faults.
  thread_local Matrix gram_columns;
  if (gram_columns.rows() != n_atoms || gram_columns.cols() < k) gram_columns.resize(n_atoms, k);
  Vector gamma;
  double residual_norm = y_norm;

  while (static_cast<Index>(support.size()) < k) {
    if (!(residual_norm >= tol.residual * y_norm) || y_norm == 0.0) break;
    const auto next = select_atom(correlations, selected, tol.tie * y_norm, tol.orthogonal * y_norm);
    if (!next) break;
    const Index j = *next;
    const Index n = static_cast<Index>(support.size());

    // Grow the Cholesky factor of G_II by one row.
    if (n == 0) {
      chol(0, 0) = std::sqrt(gram(j, j));
    } else {
      Vector w(n);
      for (Index i = 0; i < n; ++i) w(i) = gram(support[static_cast<std::size_t>(i)], j);
      chol.topLeftCorner(n, n).triangularView<Eigen::Lower>().solveInPlace(w);
      const double pivot = gram(j, j) - w.squaredNorm();
      if (!(pivot > 1e-14 * gram(j, j))) break;  // atom lies in the span of the support
      chol.block(n, 0, 1, n) = w.transpose();
      chol(n, n) = std::sqrt(pivot);
    }
    selected[static_cast<std::size_t>(j)] = 1;
    support.push_back(j);
    trace.selected_atoms.push_back(j);
    initial_on_support(n) = initial(j);
    gram_columns.col(n) = gram.col(j);

    const Index size = n + 1;
    const auto factor = chol.topLeftCorner(size, size);
    gamma = factor.triangularView<Eigen::Lower>().solve(initial_on_support.head(size));
    factor.transpose().triangularView<Eigen::Upper>().solveInPlace(gamma);

    correlations = initial;
    correlations.noalias() -= gram_columns.leftCols(size) * gamma;

    // ||r||^2 = ||y||^2 - gamma^T (Phi_I^T y); recomputed directly once the
    // subtraction starts losing digits.
    double residual2 = y_norm2 - gamma.dot(initial_on_support.head(size));
    if (residual2 < 1e-8 * y_norm2) {
      Vector residual = y;
      for (Index i = 0; i < size; ++i) {
        residual.noalias() -= gamma(i) * atoms.col(support[static_cast<std::size_t>(i)]);
      }
      residual2 = residual.squaredNorm();
    }
    residual_norm = std::sqrt(std::max(residual2, 0.0));
    trace.residual_norms.push_back(residual_norm);
  }
  return finish(n_atoms, k, support, gamma, std::move(trace));
}

}  // namespace sacrc
