#pragma once

#include "sacrc/analysis.hpp"
#include "sacrc/classify.hpp"
#include "sacrc/data.hpp"
#include "sacrc/model.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sacrc {

enum class ClassifierKind {
  kResidual,        ///< minimum-norm least-squares code, residual labeling
  kSrc,             ///< l1 code, residual labeling
  kCrcRls,          ///< ridge code, residual labeling
  kCrcRlsNormalized,///< ridge code, residuals divided by ||alpha_i||
  kSaCrc,
  kSaCrcRlsOnly,
  kSaCrcOmpOnly,
};

/// residual, src, crc-rls, crc-rls-norm, sa-crc, sa-crc-rls, sa-crc-omp
std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier(const std::string& name);
const std::vector<ClassifierKind>& all_classifiers();

struct ExperimentConfig {
  /// CSV file, or a dataset manifest (.json) that is checksum-verified.
  std::string dataset;
  std::vector<ClassifierKind> classifiers{ClassifierKind::kSaCrc, ClassifierKind::kCrcRls};
  double lambda = 0.003;
  Index k = 50;
  double lambda1 = 1e-3;
  /// Training samples per class (count or fraction) for every trial.
  std::variant<Index, double> per_class_train = Index{20};
  int trials = 10;
  std::uint64_t seed = 0;
  /// Random-projection feature dimension; 0 keeps the raw features.
  Index projection_dim = 0;
  /// Effective-sparsity grid; empty disables the sparsity diagnostics.
  std::vector<double> delta_grid;
  /// Test sample (trial 0) whose coefficients are written as a trace; -1 disables.
  Index trace_sample = -1;
  std::string output_dir;
  /// Worker threads for trials. Results do not depend on it.
  int threads = 1;

  std::vector<double> lambda_grid;
  std::vector<Index> k_grid;
  /// Share of each class's training samples used to fit during a sweep; the
  /// rest of the training samples score the candidate.
  double sweep_fit_fraction = 0.5;

  int bench_repetitions = 30;

  /// Throws InvalidArgument on trials < 1, lambda < 0, k < 1 and similar.
  void validate() const;
};

/// face (lambda 0.003), object (1.0), action (0.01); k = 50 for all.
ExperimentConfig preset(const std::string& name);
/// Keys mirror the field names; "preset" is applied first when present.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

/// Loads the dataset (CSV or manifest), applies the random projection and
/// unit-normalizes every sample.
Dataset prepare_dataset(const ExperimentConfig& config);

/// Normalized dictionary in class-contiguous layout, ridge projection, label matrix.
FittedModel fit(const Dataset& train, double lambda, Index k);

struct TrialResult {
  int trial = 0;
  Index correct = 0;
  Index incorrect = 0;
  Index failed = 0;
  double accuracy = 0.0;
  /// rows = true class, cols = predicted class
  std::vector<std::vector<Index>> confusion;
  std::vector<std::string> failures;
  std::chrono::nanoseconds classify_time{0};
};

struct ClassifierReport {
  ClassifierKind kind = ClassifierKind::kSaCrc;
  std::vector<TrialResult> trials;
  double mean_accuracy = 0.0;
  std::optional<double> std_accuracy;  ///< sample std; absent for a single trial
  /// Confusion summed over trials.
  std::vector<std::vector<Index>> confusion;
  double mean_sample_time_ms = 0.0;
};

/// Mean effective sparsity over the test samples of trial 0 at every delta.
struct SparsityCurves {
  std::vector<double> deltas;
  std::vector<double> dense;
  std::vector<double> sparse;
  std::vector<double> augmented;
  /// Fraction of samples whose augmented curve lies on or below the dense one everywhere.
  double augmented_below_dense = 0.0;
};

struct CoefficientTrace {
  Index sample = 0;
  std::string label;
  /// Class of each atom, in dictionary order.
  std::vector<std::string> atom_classes;
  Vector sparse;
  Vector dense;
  Vector augmented;
};

struct BenchmarkReport {
  ExperimentConfig config;
  std::vector<std::string> classes;
  Index features = 0;
  Index samples = 0;
  std::vector<ClassifierReport> classifiers;
  std::optional<SparsityCurves> sparsity;
  std::optional<CoefficientTrace> coefficient_trace;
};

BenchmarkReport evaluate(const ExperimentConfig& config);
/// evaluate() on an already prepared dataset.
BenchmarkReport evaluate(const ExperimentConfig& config, const Dataset& dataset);

enum class SweepStage { kLambda = 1, kSparsity = 2, kRefine = 3 };

struct SweepPoint {
  SweepStage stage = SweepStage::kLambda;
  double lambda = 0.0;
  Index k = 0;
  Index lambda_index = 0;
  Index k_index = 0;  ///< -1 in stage 1, where the sparse code is zeroed
  double accuracy = 0.0;
};

struct SweepReport {
  ExperimentConfig config;
  /// Every evaluation in call order.
  std::vector<SweepPoint> points;
  double best_lambda = 0.0;
  Index best_k = 0;
  double best_accuracy = 0.0;
  /// SA-CRC test accuracy per trial at the recommended point.
  std::vector<double> test_accuracy;
};

/// Stage 1 scores RLS-only SA-CRC over the lambda grid, stage 2 full SA-CRC
/// over the k grid at the best lambda, stage 3 the 3x3 block of grid
/// neighbours around the stage-2 winner. Candidates are scored by mean
/// accuracy over trials on a held-out part of each trial's training set;
/// ties keep the earlier candidate. Throws EmptyGrid on an empty grid.
SweepReport sweep(const ExperimentConfig& config);
SweepReport sweep(const ExperimentConfig& config, const Dataset& dataset);

struct TimingRow {
  ClassifierKind kind = ClassifierKind::kSaCrc;
  int repetitions = 0;
  /// Per-sample time of each repetition is the pass time over the test set / size.
  double median_ms = 0.0;
  double mean_ms = 0.0;
};

struct TimingTable {
  Index atoms = 0;
  Index classes = 0;
  Index features = 0;
  Index test_samples = 0;
  Index k = 0;
  double lambda = 0.0;
  std::vector<TimingRow> rows;
};

/// One warm-up pass, then `repetitions` timed passes per classifier, all on
/// the calling thread. Throws EmptyDataset for an empty test set.
TimingTable bench_timing(const FittedModel& model, const Dataset& test,
                         const std::vector<ClassifierKind>& classifiers, int repetitions,
                         double lambda1 = 1e-3);

/// Classifies one sample; the label index refers to the model's partition.
ClassificationOutcome classify_with(ClassifierKind kind, const FittedModel& model, const Vector& y,
                                    double lambda1, const Matrix* least_squares = nullptr,
                                    const LassoSolver* lasso = nullptr);

// Serialization. Timings never enter report_json, so equal configs give
// byte-identical reports.
std::string report_json(const BenchmarkReport& report);
std::string report_text(const BenchmarkReport& report);
std::string timing_json(const BenchmarkReport& report);
std::string sweep_json(const SweepReport& report);
std::string sweep_text(const SweepReport& report);
std::string timing_table_json(const TimingTable& table);
std::string timing_table_text(const TimingTable& table);

/// Writes sparsity_curves.csv, coefficient_trace.csv and sweep.csv for the
/// parts that are present and returns the paths written. Nothing is created
/// when there is nothing to write.
std::vector<std::filesystem::path> emit_plots(const BenchmarkReport& report,
                                              const SweepReport* sweep_report,
                                              const std::filesystem::path& outdir);

}  // namespace sacrc
