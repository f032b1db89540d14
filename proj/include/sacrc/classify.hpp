#pragma once

#include "sacrc/model.hpp"
#include "sacrc/solvers.hpp"

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace sacrc {

enum class ScoreMode {
  kResidual,  ///< label = argmin of per-class reconstruction residuals
  kPooled,    ///< label = argmax of per-class coefficient sums q = L alpha
};

/// Counts of the operations a classify call performed. Pass one in through
/// the options to inspect the pipeline from tests.
struct OpTrace {
  int rls_codes = 0;
  int omp_codes = 0;
  int lasso_codes = 0;
  int class_residual_evaluations = 0;
  int pooled_labelings = 0;
};

struct ClassificationOutcome {
  Index label = 0;
  ScoreMode mode = ScoreMode::kResidual;
  /// Residuals r_i (kResidual) or pooled sums q_i (kPooled).
  Vector scores;
  Representation representation;
  /// Representation + labeling only; model fitting is never included.
  std::chrono::nanoseconds elapsed{0};
  std::vector<std::string> warnings;
};

/// r_i = ||y - Phi_i alpha_i||_2 for every class i.
Vector class_residuals(const Dictionary& dictionary, const Representation& alpha, const Vector& y);

/// Index of the smallest entry; ties go to the lowest index.
Index argmin_lowest(const Vector& scores);
/// Index of the largest entry; ties go to the lowest index.
Index argmax_lowest(const Vector& scores);

ClassificationOutcome classify_residual(const FittedModel& model, const Representation& alpha,
                                        const Vector& y, OpTrace* trace = nullptr);

struct CrcOptions {
  /// Score classes by r_i / ||alpha_i||_2 instead of r_i.
  bool normalize_residuals = false;
  OpTrace* trace = nullptr;
};

ClassificationOutcome classify_crc_rls(const FittedModel& model, const Vector& y,
                                       const CrcOptions& options = {});

struct SrcOptions {
  double lambda1 = 1e-3;
  LassoOptions lasso{1e-6, 5000};
  /// Solver prepared once for the model; built on the fly when null.
  const LassoSolver* solver = nullptr;
  OpTrace* trace = nullptr;
};

/// The sample is coded at unit norm and the code scaled back by ||y||, so
/// the label does not depend on the scale of y. Non-convergence is recorded
/// in the outcome's warnings.
ClassificationOutcome classify_src(const FittedModel& model, const Vector& y,
                                   const SrcOptions& options = {});

/// (alpha_hat + alpha_check) / ||alpha_hat + alpha_check||. Throws
/// DegenerateSum when the sum has norm below 1e-14.
Representation augment(const Representation& alpha_hat, const Representation& alpha_check);

/// q = L alpha and argmax_i q_i (ties to the lowest index).
std::pair<Index, Vector> pooled_label(const LabelMatrix& label_matrix, const Representation& alpha);

enum class SaCrcVariant {
  kFull,
  kRlsOnly,  ///< alpha_hat forced to zero
  kOmpOnly,  ///< alpha_check forced to zero
};

struct SaCrcOptions {
  SaCrcVariant variant = SaCrcVariant::kFull;
  /// Use the model's Gram matrix for OMP (batch route); false runs plain OMP.
  bool gram_pursuit = true;
  OpTrace* trace = nullptr;
};

struct SaCrcOutcome {
  ClassificationOutcome outcome;
  /// The two codes that were summed; zero vectors for the disabled part.
  Vector sparse_code;
  Vector dense_code;
};

/// Dense ridge code + k-sparse OMP code, augmented and labeled by pooling.
ClassificationOutcome classify_sa_crc(const FittedModel& model, const Vector& y,
                                      const SaCrcOptions& options = {});

/// classify_sa_crc that also hands back both intermediate codes.
SaCrcOutcome classify_sa_crc_detailed(const FittedModel& model, const Vector& y,
                                      const SaCrcOptions& options = {});

}  // namespace sacrc
