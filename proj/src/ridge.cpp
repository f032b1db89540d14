#include "sacrc/error.hpp"
#include "sacrc/solvers.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <limits>

namespace sacrc {

namespace {

Matrix gram_of(const Matrix& atoms) {
  Matrix gram(atoms.cols(), atoms.cols());
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(atoms.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  return gram;
}

}  // namespace

RidgeProjection build_projection(const Dictionary& dictionary, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(Errc::kInvalidArgument, "lambda must be finite and nonnegative");
  }
  const Matrix& atoms = dictionary.atoms();
  Matrix gram = gram_of(atoms);

  Matrix regularized = gram;
  regularized.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(regularized);
  if (llt.info() != Eigen::Success) {
    throw Error(Errc::kSingularGram, "Phi^T Phi + lambda I is not positive definite");
  }
  if (lambda == 0.0) {
    const double floor = static_cast<double>(atoms.cols()) * std::numeric_limits<double>::epsilon();
    if (llt.rcond() < floor) {
      throw Error(Errc::kSingularGram, "Phi^T Phi is numerically singular and lambda = 0");
    }
  }
  Matrix projection = llt.solve(atoms.transpose());

  const double residual = normal_equation_residual(atoms, gram, projection, lambda);
  if (!(residual <= 1e-8)) {
    throw Error(Errc::kSingularGram,
                "normal equations not satisfied after solve (residual " + std::to_string(residual) + ")");
  }
  return RidgeProjection(std::move(projection), std::move(gram), lambda);
}

Representation rls_code(const RidgeProjection& projection, const Vector& y) {
  if (y.size() != projection.matrix().cols()) {
    throw Error(Errc::kDimensionMismatch, "sample has " + std::to_string(y.size()) +
                                              " features, dictionary has " +
                                              std::to_string(projection.matrix().cols()));
  }
  return Representation::dense(projection.matrix() * y);
}

Representation rls_code(const FittedModel& model, const Vector& y) {
  if (y.size() != model.projection().cols()) {
    throw Error(Errc::kDimensionMismatch, "sample has " + std::to_string(y.size()) +
                                              " features, dictionary has " +
                                              std::to_string(model.projection().cols()));
  }
  return Representation::dense(model.projection() * y);
}

Matrix least_squares_operator(const Dictionary& dictionary) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(dictionary.atoms());
  return cod.pseudoInverse();
}

FittedModel make_model(Dictionary dictionary, double lambda, Index k) {
  RidgeProjection projection = build_projection(dictionary, lambda);
  Matrix p = projection.matrix();
  Matrix g = projection.gram();
  return FittedModel(std::move(dictionary), std::move(p), std::move(g), lambda, k);
}

}  // namespace sacrc
