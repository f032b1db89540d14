#include "sacrc/classify.hpp"

#include "sacrc/error.hpp"

#include <cmath>
#include <limits>

namespace sacrc {

namespace {

using Clock = std::chrono::steady_clock;

void bump(OpTrace* trace, int OpTrace::*counter) {
  if (trace != nullptr) ++(trace->*counter);
}

void check_sample(const FittedModel& model, const Vector& y) {
  if (y.size() != model.dictionary().rows()) {
    throw Error(Errc::kDimensionMismatch, "sample has " + std::to_string(y.size()) +
                                              " features, dictionary has " +
                                              std::to_string(model.dictionary().rows()));
  }
}

ClassificationOutcome residual_outcome(const FittedModel& model, Representation alpha,
                                       const Vector& y, OpTrace* trace) {
  bump(trace, &OpTrace::class_residual_evaluations);
  Vector residuals = class_residuals(model.dictionary(), alpha, y);
  const Index label = argmin_lowest(residuals);
  return ClassificationOutcome{label, ScoreMode::kResidual, std::move(residuals), std::move(alpha),
                               std::chrono::nanoseconds{0}, {}};
}

}  // namespace

Vector class_residuals(const Dictionary& dictionary, const Representation& alpha, const Vector& y) {
  if (alpha.size() != dictionary.cols()) {
    throw Error(Errc::kDimensionMismatch, "representation length differs from atom count");
  }
  if (y.size() != dictionary.rows()) {
    throw Error(Errc::kDimensionMismatch, "sample length differs from feature dimension");
  }
  const ClassPartition& partition = dictionary.partition();
  const Vector& coefficients = alpha.coefficients();
  Vector residuals(partition.class_count());
  for (Index c = 0; c < partition.class_count(); ++c) {
    const Vector part = dictionary.class_block(c) * coefficients.segment(partition.offset(c), partition.size(c));
    residuals(c) = (y - part).norm();
  }
  return residuals;
}

Index argmin_lowest(const Vector& scores) {
  if (scores.size() == 0) throw Error(Errc::kInvalidArgument, "no scores");
  Index best = 0;
  for (Index i = 1; i < scores.size(); ++i) {
    if (scores(i) < scores(best)) best = i;
  }
  return best;
}

Index argmax_lowest(const Vector& scores) {
  if (scores.size() == 0) throw Error(Errc::kInvalidArgument, "no scores");
  Index best = 0;
  for (Index i = 1; i < scores.size(); ++i) {
    if (scores(i) > scores(best)) best = i;
  }
  return best;
}

ClassificationOutcome classify_residual(const FittedModel& model, const Representation& alpha,
                                        const Vector& y, OpTrace* trace) {
  const auto start = Clock::now();
  ClassificationOutcome outcome = residual_outcome(model, alpha, y, trace);
  outcome.elapsed = Clock::now() - start;
  return outcome;
}

ClassificationOutcome classify_crc_rls(const FittedModel& model, const Vector& y,
                                       const CrcOptions& options) {
  const auto start = Clock::now();
  check_sample(model, y);
  bump(options.trace, &OpTrace::rls_codes);
  ClassificationOutcome outcome = residual_outcome(model, rls_code(model, y), y, options.trace);
  if (options.normalize_residuals) {
    const ClassPartition& partition = model.dictionary().partition();
    const Vector& alpha = outcome.representation.coefficients();
    for (Index c = 0; c < partition.class_count(); ++c) {
      const double weight = alpha.segment(partition.offset(c), partition.size(c)).norm();
      outcome.scores(c) = weight > 0.0 ? outcome.scores(c) / weight
                                       : std::numeric_limits<double>::infinity();
    }
    outcome.label = argmin_lowest(outcome.scores);
  }
  outcome.elapsed = Clock::now() - start;
  return outcome;
}

ClassificationOutcome classify_src(const FittedModel& model, const Vector& y,
                                   const SrcOptions& options) {
  const auto start = Clock::now();
  check_sample(model, y);
  const double scale = y.norm();
  const Vector unit = scale > 0.0 ? Vector(y / scale) : y;

  bump(options.trace, &OpTrace::lasso_codes);
  LassoResult coded = options.solver != nullptr
                          ? options.solver->solve(unit, options.lambda1, options.lasso)
                          : LassoSolver(model.dictionary(), model.gram()).solve(unit, options.lambda1, options.lasso);

  Vector coefficients = coded.code.coefficients();
  if (scale > 0.0) coefficients *= scale;
  std::vector<Index> support = *coded.code.support();
  const Index n = coefficients.size();
  ClassificationOutcome outcome = residual_outcome(
      model, Representation::sparse(std::move(coefficients), std::move(support), n), y, options.trace);
  if (!coded.converged) {
    outcome.warnings.push_back("NoConvergence: l1 solver stopped after " +
                               std::to_string(coded.iterations) + " iterations with optimality " +
                               std::to_string(coded.optimality));
  }
  outcome.elapsed = Clock::now() - start;
  return outcome;
}

Representation augment(const Representation& alpha_hat, const Representation& alpha_check) {
  if (alpha_hat.size() != alpha_check.size()) {
    throw Error(Errc::kDimensionMismatch, "sparse and dense codes differ in length");
  }
  Vector sum = alpha_hat.coefficients() + alpha_check.coefficients();
  const double norm = sum.norm();
  if (!(norm >= 1e-14)) {
    throw Error(Errc::kDegenerateSum, "sparse + dense code has norm " + std::to_string(norm));
  }
  sum /= norm;
  return Representation::augmented(std::move(sum));
}

std::pair<Index, Vector> pooled_label(const LabelMatrix& label_matrix, const Representation& alpha) {
  Vector q = label_matrix.multiply(alpha.coefficients());
  const Index label = argmax_lowest(q);
  return {label, std::move(q)};
}

SaCrcOutcome classify_sa_crc_detailed(const FittedModel& model, const Vector& y,
                                      const SaCrcOptions& options) {
  const auto start = Clock::now();
  check_sample(model, y);
  const Index n = model.dictionary().cols();

  Representation dense = Representation::dense(Vector::Zero(n));
  if (options.variant != SaCrcVariant::kOmpOnly) {
    bump(options.trace, &OpTrace::rls_codes);
    dense = rls_code(model, y);
  }
  Representation sparse = Representation::sparse(Vector::Zero(n), {}, model.k());
  if (options.variant != SaCrcVariant::kRlsOnly) {
    bump(options.trace, &OpTrace::omp_codes);
    PursuitResult pursuit = options.gram_pursuit
                                ? GramPursuit(model.dictionary(), model.gram()).code(y, model.k())
                                : omp(model.dictionary(), y, model.k());
    sparse = std::move(pursuit.code);
  }

  Representation alpha = augment(sparse, dense);
  bump(options.trace, &OpTrace::pooled_labelings);
  auto [label, q] = pooled_label(model.label_matrix(), alpha);

  SaCrcOutcome result{ClassificationOutcome{label, ScoreMode::kPooled, std::move(q), std::move(alpha),
                                            std::chrono::nanoseconds{0}, {}},
                      sparse.coefficients(), dense.coefficients()};
  result.outcome.elapsed = Clock::now() - start;
  return result;
}

ClassificationOutcome classify_sa_crc(const FittedModel& model, const Vector& y,
                                      const SaCrcOptions& options) {
  return classify_sa_crc_detailed(model, y, options).outcome;
}

}  // namespace sacrc
