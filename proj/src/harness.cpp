#include "sacrc/harness.hpp"

#include "sacrc/error.hpp"
#include "sacrc/random.hpp"
#include "sacrc/solvers.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace sacrc {

namespace {

using Clock = std::chrono::steady_clock;
using json = nlohmann::ordered_json;

struct ClassifierName {
  ClassifierKind kind;
  const char* name;
};

constexpr ClassifierName kClassifierNames[] = {
    {ClassifierKind::kResidual, "residual"},     {ClassifierKind::kSrc, "src"},
    {ClassifierKind::kCrcRls, "crc-rls"},        {ClassifierKind::kCrcRlsNormalized, "crc-rls-norm"},
    {ClassifierKind::kSaCrc, "sa-crc"},          {ClassifierKind::kSaCrcRlsOnly, "sa-crc-rls"},
    {ClassifierKind::kSaCrcOmpOnly, "sa-crc-omp"},
};

// Runs body(0..count-1) on up to `threads` workers; the first exception is rethrown.
void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Keeps timed classify calls from being optimized away.
volatile Index timing_sink = 0;

bool is_numerical_failure(const Error& e) { return exit_code(e.code()) == 3; }

double mean_of(const std::vector<double>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::optional<double> sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return std::nullopt;
  const double mean = mean_of(values);
  double sum = 0.0;
  for (const double v : values) sum += (v - mean) * (v - mean);
  return std::sqrt(sum / static_cast<double>(values.size() - 1));
}

SplitSpec split_spec(const ExperimentConfig& config) {
  return SplitSpec{config.per_class_train, config.seed, config.trials};
}

// Models fitted per trial plus whatever per-model state the chosen
// classifiers need.
struct PreparedModel {
  explicit PreparedModel(FittedModel m) : model(std::move(m)) {}
  FittedModel model;
  std::optional<Matrix> least_squares;
  std::optional<LassoSolver> lasso;

  void prepare_for(const std::vector<ClassifierKind>& kinds) {
    for (const ClassifierKind kind : kinds) {
      if (kind == ClassifierKind::kResidual && !least_squares) {
        least_squares = least_squares_operator(model.dictionary());
      }
      if (kind == ClassifierKind::kSrc && !lasso) lasso.emplace(model.dictionary(), model.gram());
    }
  }
  ClassificationOutcome classify(ClassifierKind kind, const Vector& y, double lambda1) const {
    return classify_with(kind, model, y, lambda1, least_squares ? &*least_squares : nullptr,
                         lasso ? &*lasso : nullptr);
  }
};

std::vector<Index> class_indices(const std::vector<std::string>& classes,
                                 const std::vector<std::string>& labels) {
  std::unordered_map<std::string, Index> slot;
  for (std::size_t c = 0; c < classes.size(); ++c) slot.emplace(classes[c], static_cast<Index>(c));
  std::vector<Index> out;
  out.reserve(labels.size());
  for (const std::string& label : labels) out.push_back(slot.at(label));
  return out;
}

// Partition index -> index into the global class list.
std::vector<Index> partition_to_global(const ClassPartition& partition,
                                       const std::vector<std::string>& classes) {
  std::vector<Index> out;
  for (Index c = 0; c < partition.class_count(); ++c) {
    const auto it = std::find(classes.begin(), classes.end(), partition.label(c));
    out.push_back(static_cast<Index>(it - classes.begin()));
  }
  return out;
}

TrialResult score(const PreparedModel& prepared, ClassifierKind kind, const Dataset& test,
                  const std::vector<std::string>& classes, double lambda1, int trial) {
  const std::size_t C = classes.size();
  const std::vector<Index> truth = class_indices(classes, test.labels);
  const std::vector<Index> to_global = partition_to_global(prepared.model.dictionary().partition(), classes);

  TrialResult result;
  result.trial = trial;
  result.confusion.assign(C, std::vector<Index>(C, 0));
  for (Index j = 0; j < test.size(); ++j) {
    const Index expected = truth[static_cast<std::size_t>(j)];
    try {
      const ClassificationOutcome outcome = prepared.classify(kind, test.features.col(j), lambda1);
      result.classify_time += outcome.elapsed;
      const Index predicted = to_global[static_cast<std::size_t>(outcome.label)];
      ++result.confusion[static_cast<std::size_t>(expected)][static_cast<std::size_t>(predicted)];
      (predicted == expected ? result.correct : result.incorrect)++;
    } catch (const Error& e) {
      if (!is_numerical_failure(e)) throw;
      ++result.failed;
      result.failures.push_back("sample " + std::to_string(j) + ": " + e.what());
    }
  }
  result.accuracy = static_cast<double>(result.correct) / static_cast<double>(test.size());
  return result;
}

Index counts_or_zero(const Vector& alpha, double delta) {
  if (alpha.squaredNorm() == 0.0) return 0;
  return effective_sparsity(alpha, delta);
}

struct Diagnostics {
  std::optional<SparsityCurves> sparsity;
  std::optional<CoefficientTrace> trace;
};

Diagnostics diagnose(const ExperimentConfig& config, const FittedModel& model, const Dataset& test) {
  Diagnostics out;
  const bool want_curves = !config.delta_grid.empty();
  const bool want_trace = config.trace_sample >= 0;
  if (!want_curves && !want_trace) return out;
  if (want_trace && config.trace_sample >= test.size()) {
    throw Error(Errc::kInvalidArgument, "trace sample " + std::to_string(config.trace_sample) +
                                            " outside the test set of " + std::to_string(test.size()));
  }
  if (want_curves) {
    // Validates the grid.
    (void)sparsity_curve(Vector::Ones(1), config.delta_grid);
    SparsityCurves curves;
    curves.deltas = config.delta_grid;
    const std::size_t G = curves.deltas.size();
    curves.dense.assign(G, 0.0);
    curves.sparse.assign(G, 0.0);
    curves.augmented.assign(G, 0.0);
    Index below = 0;
    Index coded = 0;
    for (Index j = 0; j < test.size(); ++j) {
      std::optional<SaCrcOutcome> found;
      try {
        found.emplace(classify_sa_crc_detailed(model, test.features.col(j)));
      } catch (const Error& e) {
        if (!is_numerical_failure(e)) throw;
        continue;
      }
      const SaCrcOutcome& detail = *found;
      ++coded;
      bool all_below = true;
      for (std::size_t g = 0; g < G; ++g) {
        const double delta = curves.deltas[g];
        const Index dense = counts_or_zero(detail.dense_code, delta);
        const Index augmented = counts_or_zero(detail.outcome.representation.coefficients(), delta);
        curves.dense[g] += static_cast<double>(dense);
        curves.sparse[g] += static_cast<double>(counts_or_zero(detail.sparse_code, delta));
        curves.augmented[g] += static_cast<double>(augmented);
        all_below = all_below && augmented <= dense;
      }
      if (all_below) ++below;
    }
    if (coded > 0) {
      for (std::size_t g = 0; g < G; ++g) {
        curves.dense[g] /= static_cast<double>(coded);
        curves.sparse[g] /= static_cast<double>(coded);
        curves.augmented[g] /= static_cast<double>(coded);
      }
      curves.augmented_below_dense = static_cast<double>(below) / static_cast<double>(coded);
    }
    out.sparsity = std::move(curves);
  }
  if (want_trace) {
    const SaCrcOutcome detail = classify_sa_crc_detailed(model, test.features.col(config.trace_sample));
    const ClassPartition& partition = model.dictionary().partition();
    std::vector<std::string> atom_classes;
    for (Index j = 0; j < partition.total(); ++j) atom_classes.push_back(partition.label(partition.class_of_column(j)));
    out.trace = CoefficientTrace{config.trace_sample,
                                 test.labels[static_cast<std::size_t>(config.trace_sample)],
                                 std::move(atom_classes), detail.sparse_code, detail.dense_code,
                                 detail.outcome.representation.coefficients()};
  }
  return out;
}

std::vector<Index> check_grids(const ExperimentConfig& config) {
  if (config.lambda_grid.empty() || config.k_grid.empty()) {
    throw Error(Errc::kEmptyGrid, "sweep needs a non-empty lambda grid and k grid");
  }
  for (const double lambda : config.lambda_grid) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw Error(Errc::kInvalidArgument, "lambda grid values must be finite and nonnegative");
    }
  }
  for (const Index k : config.k_grid) {
    if (k < 1) throw Error(Errc::kInvalidSparsity, "k grid values must be at least 1");
  }
  return config.k_grid;
}

}  // namespace

std::string to_string(ClassifierKind kind) {
  for (const ClassifierName& entry : kClassifierNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

ClassifierKind parse_classifier(const std::string& name) {
  for (const ClassifierName& entry : kClassifierNames) {
    if (name == entry.name) return entry.kind;
  }
  throw Error(Errc::kInvalidArgument, "unknown classifier '" + name + "'");
}

const std::vector<ClassifierKind>& all_classifiers() {
  static const std::vector<ClassifierKind> kinds = [] {
    std::vector<ClassifierKind> out;
    for (const ClassifierName& entry : kClassifierNames) out.push_back(entry.kind);
    return out;
  }();
  return kinds;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw Error(Errc::kInvalidArgument, "trials must be at least 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(Errc::kInvalidArgument, "lambda must be >= 0");
  if (k < 1) throw Error(Errc::kInvalidSparsity, "k must be at least 1");
  if (!(lambda1 > 0.0) || !std::isfinite(lambda1)) throw Error(Errc::kInvalidArgument, "lambda1 must be > 0");
  if (classifiers.empty()) throw Error(Errc::kInvalidArgument, "no classifier selected");
  if (projection_dim < 0) throw Error(Errc::kInvalidArgument, "projection dimension must be >= 0");
  if (threads < 1) throw Error(Errc::kInvalidArgument, "threads must be at least 1");
  if (bench_repetitions < 1) throw Error(Errc::kInvalidArgument, "repetitions must be at least 1");
  if (!(sweep_fit_fraction > 0.0 && sweep_fit_fraction < 1.0)) {
    throw Error(Errc::kInvalidArgument, "sweep fit fraction must lie in (0, 1)");
  }
  if (const Index* count = std::get_if<Index>(&per_class_train); count != nullptr && *count < 1) {
    throw Error(Errc::kInvalidArgument, "training count must be at least 1");
  }
  if (const double* fraction = std::get_if<double>(&per_class_train);
      fraction != nullptr && !(*fraction > 0.0 && *fraction < 1.0)) {
    throw Error(Errc::kInvalidArgument, "training fraction must lie in (0, 1)");
  }
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig config;
  config.k = 50;
  if (name == "face") {
    config.lambda = 0.003;
  } else if (name == "object") {
    config.lambda = 1.0;
  } else if (name == "action") {
    config.lambda = 0.01;
  } else {
    throw Error(Errc::kInvalidArgument, "unknown preset '" + name + "' (face, object, action)");
  }
  return config;
}

ExperimentConfig config_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) throw Error(Errc::kInvalidArgument, "config must be a JSON object");
    ExperimentConfig config = doc.contains("preset") ? preset(doc["preset"].get<std::string>())
                                                     : ExperimentConfig{};
    for (const auto& [key, value] : doc.items()) {
      if (key == "preset") continue;
      if (key == "dataset") config.dataset = value.get<std::string>();
      else if (key == "classifiers") {
        config.classifiers.clear();
        for (const auto& name : value) config.classifiers.push_back(parse_classifier(name.get<std::string>()));
      } else if (key == "lambda") config.lambda = value.get<double>();
      else if (key == "k") config.k = value.get<Index>();
      else if (key == "lambda1") config.lambda1 = value.get<double>();
      else if (key == "per_class_train") {
        if (value.is_number_integer()) config.per_class_train = value.get<Index>();
        else config.per_class_train = value.get<double>();
      } else if (key == "trials") config.trials = value.get<int>();
      else if (key == "seed") config.seed = value.get<std::uint64_t>();
      else if (key == "projection_dim") config.projection_dim = value.get<Index>();
      else if (key == "delta_grid") config.delta_grid = value.get<std::vector<double>>();
      else if (key == "trace_sample") config.trace_sample = value.get<Index>();
      else if (key == "output_dir") config.output_dir = value.get<std::string>();
      else if (key == "threads") config.threads = value.get<int>();
      else if (key == "lambda_grid") config.lambda_grid = value.get<std::vector<double>>();
      else if (key == "k_grid") config.k_grid = value.get<std::vector<Index>>();
      else if (key == "sweep_fit_fraction") config.sweep_fit_fraction = value.get<double>();
      else if (key == "bench_repetitions") config.bench_repetitions = value.get<int>();
      else throw Error(Errc::kInvalidArgument, "unknown config key '" + key + "'");
    }
    return config;
  } catch (const json::exception& e) {
    throw Error(Errc::kInvalidArgument, std::string("config: ") + e.what());
  }
}

namespace {

// Everything a report depends on; output_dir and threads are left out.
json config_document(const ExperimentConfig& config) {
  json doc;
  doc["dataset"] = config.dataset;
  json names = json::array();
  for (const ClassifierKind kind : config.classifiers) names.push_back(to_string(kind));
  doc["classifiers"] = names;
  doc["lambda"] = config.lambda;
  doc["k"] = config.k;
  doc["lambda1"] = config.lambda1;
  if (const Index* count = std::get_if<Index>(&config.per_class_train)) doc["per_class_train"] = *count;
  else doc["per_class_train"] = std::get<double>(config.per_class_train);
  doc["trials"] = config.trials;
  doc["seed"] = config.seed;
  doc["projection_dim"] = config.projection_dim;
  doc["delta_grid"] = config.delta_grid;
  doc["trace_sample"] = config.trace_sample;
  doc["lambda_grid"] = config.lambda_grid;
  doc["k_grid"] = config.k_grid;
  doc["sweep_fit_fraction"] = config.sweep_fit_fraction;
  doc["bench_repetitions"] = config.bench_repetitions;
  return doc;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& config) {
  json doc = config_document(config);
  doc["output_dir"] = config.output_dir;
  doc["threads"] = config.threads;
  return doc.dump(2);
}

Dataset prepare_dataset(const ExperimentConfig& config) {
  if (config.dataset.empty()) throw Error(Errc::kInvalidArgument, "no dataset given");
  const std::filesystem::path path = config.dataset;
  if (!std::filesystem::exists(path)) throw Error(Errc::kIo, "dataset not found: " + config.dataset);
  Dataset dataset = path.extension() == ".json" ? load_verified(path) : load_csv(path);
  if (config.projection_dim > 0) dataset = random_projection(dataset, config.projection_dim, config.seed);
  return normalize_columns(dataset);
}

FittedModel fit(const Dataset& train, double lambda, Index k) {
  train.validate();
  Dictionary dictionary = Dictionary::from_labeled_columns(train.features, train.labels, Normalize::kYes);
  return make_model(std::move(dictionary), lambda, k);
}

ClassificationOutcome classify_with(ClassifierKind kind, const FittedModel& model, const Vector& y,
                                    double lambda1, const Matrix* least_squares, const LassoSolver* lasso) {
  switch (kind) {
    case ClassifierKind::kResidual: {
      const auto start = Clock::now();
      const Matrix owned = least_squares == nullptr ? least_squares_operator(model.dictionary()) : Matrix{};
      const Matrix& pinv = least_squares == nullptr ? owned : *least_squares;
      if (y.size() != pinv.cols()) throw Error(Errc::kDimensionMismatch, "sample has the wrong dimension");
      ClassificationOutcome outcome = classify_residual(model, Representation::dense(pinv * y), y);
      outcome.elapsed = Clock::now() - start;
      return outcome;
    }
    case ClassifierKind::kSrc: {
      SrcOptions options;
      options.lambda1 = lambda1;
      options.solver = lasso;
      return classify_src(model, y, options);
    }
    case ClassifierKind::kCrcRls:
      return classify_crc_rls(model, y);
    case ClassifierKind::kCrcRlsNormalized:
      return classify_crc_rls(model, y, CrcOptions{true, nullptr});
    case ClassifierKind::kSaCrc:
      return classify_sa_crc(model, y);
    case ClassifierKind::kSaCrcRlsOnly:
      return classify_sa_crc(model, y, SaCrcOptions{SaCrcVariant::kRlsOnly, true, nullptr});
    case ClassifierKind::kSaCrcOmpOnly:
      return classify_sa_crc(model, y, SaCrcOptions{SaCrcVariant::kOmpOnly, true, nullptr});
  }
  throw Error(Errc::kInvalidArgument, "unknown classifier");
}

BenchmarkReport evaluate(const ExperimentConfig& config) {
  config.validate();
  return evaluate(config, prepare_dataset(config));
}

BenchmarkReport evaluate(const ExperimentConfig& config, const Dataset& dataset) {
  config.validate();
  dataset.validate();
  BenchmarkReport report;
  report.config = config;
  report.classes = dataset.classes();
  report.features = dataset.dimension();
  report.samples = dataset.size();

  const std::size_t K = config.classifiers.size();
  const std::size_t T = static_cast<std::size_t>(config.trials);
  std::vector<std::vector<TrialResult>> results(K, std::vector<TrialResult>(T));
  Diagnostics diagnostics;

  parallel_for(config.trials, config.threads, [&](int trial) {
    const Split parts = split(dataset, split_spec(config), trial);
    PreparedModel prepared(fit(parts.train, config.lambda, config.k));
    prepared.prepare_for(config.classifiers);
    for (std::size_t c = 0; c < K; ++c) {
      results[c][static_cast<std::size_t>(trial)] =
          score(prepared, config.classifiers[c], parts.test, report.classes, config.lambda1, trial);
    }
    if (trial == 0) diagnostics = diagnose(config, prepared.model, parts.test);
  });

  const std::size_t C = report.classes.size();
  for (std::size_t c = 0; c < K; ++c) {
    ClassifierReport entry;
    entry.kind = config.classifiers[c];
    entry.trials = std::move(results[c]);
    entry.confusion.assign(C, std::vector<Index>(C, 0));
    std::vector<double> accuracies;
    std::chrono::nanoseconds total{0};
    Index classified = 0;
    for (const TrialResult& trial : entry.trials) {
      accuracies.push_back(trial.accuracy);
      total += trial.classify_time;
      classified += trial.correct + trial.incorrect;
      for (std::size_t a = 0; a < C; ++a) {
        for (std::size_t b = 0; b < C; ++b) entry.confusion[a][b] += trial.confusion[a][b];
      }
    }
    entry.mean_accuracy = mean_of(accuracies);
    entry.std_accuracy = sample_std(accuracies);
    entry.mean_sample_time_ms =
        classified > 0 ? std::chrono::duration<double, std::milli>(total).count() / static_cast<double>(classified)
                       : 0.0;
    report.classifiers.push_back(std::move(entry));
  }
  report.sparsity = std::move(diagnostics.sparsity);
  report.coefficient_trace = std::move(diagnostics.trace);
  return report;
}

SweepReport sweep(const ExperimentConfig& config) {
  config.validate();
  check_grids(config);
  return sweep(config, prepare_dataset(config));
}

SweepReport sweep(const ExperimentConfig& config, const Dataset& dataset) {
  config.validate();
  check_grids(config);
  dataset.validate();
  const std::vector<double>& lambdas = config.lambda_grid;
  const std::vector<Index>& ks = config.k_grid;
  const std::vector<std::string> classes = dataset.classes();

  struct Fold {
    Dataset fit_part;
    Dataset validation;
    Dataset train;
    Dataset test;
  };
  std::vector<Fold> folds(static_cast<std::size_t>(config.trials));
  // Validation splits reuse the splitter under a derived seed.
  const SplitSpec inner{config.sweep_fit_fraction, mix64(config.seed ^ 0x5357454550ULL), 1};
  for (int t = 0; t < config.trials; ++t) {
    Split outer = split(dataset, split_spec(config), t);
    Split held = split(outer.train, inner, t);
    folds[static_cast<std::size_t>(t)] =
        Fold{std::move(held.train), std::move(held.test), std::move(outer.train), std::move(outer.test)};
  }
  const Index atoms = folds.front().fit_part.size();
  for (const Index k : ks) {
    if (k > atoms) {
      throw Error(Errc::kInvalidSparsity, "k = " + std::to_string(k) + " exceeds the " +
                                              std::to_string(atoms) + " atoms available while sweeping");
    }
  }

  SweepReport report;
  report.config = config;
  auto run = [&](SweepStage stage, Index li, Index ki) {
    const double lambda = lambdas[static_cast<std::size_t>(li)];
    const Index k = ki < 0 ? 1 : ks[static_cast<std::size_t>(ki)];
    const ClassifierKind kind = ki < 0 ? ClassifierKind::kSaCrcRlsOnly : ClassifierKind::kSaCrc;
    std::vector<double> accuracy(folds.size());
    parallel_for(config.trials, config.threads, [&](int t) {
      const Fold& fold = folds[static_cast<std::size_t>(t)];
      const PreparedModel prepared(fit(fold.fit_part, lambda, k));
      accuracy[static_cast<std::size_t>(t)] =
          score(prepared, kind, fold.validation, classes, config.lambda1, t).accuracy;
    });
    report.points.push_back(SweepPoint{stage, lambda, ki < 0 ? 0 : k, li, ki, mean_of(accuracy)});
    return report.points.back().accuracy;
  };

  const Index L = static_cast<Index>(lambdas.size());
  const Index K = static_cast<Index>(ks.size());
  Index best_l = 0;
  double best = -1.0;
  for (Index li = 0; li < L; ++li) {
    const double acc = run(SweepStage::kLambda, li, -1);
    if (acc > best) {
      best = acc;
      best_l = li;
    }
  }
  Index best_k = 0;
  best = -1.0;
  for (Index ki = 0; ki < K; ++ki) {
    const double acc = run(SweepStage::kSparsity, best_l, ki);
    if (acc > best) {
      best = acc;
      best_k = ki;
    }
  }
  const Index center_l = best_l;
  const Index center_k = best_k;
  for (Index li = std::max<Index>(0, center_l - 1); li <= std::min(L - 1, center_l + 1); ++li) {
    for (Index ki = std::max<Index>(0, center_k - 1); ki <= std::min(K - 1, center_k + 1); ++ki) {
      if (li == center_l && ki == center_k) continue;
      const double acc = run(SweepStage::kRefine, li, ki);
      if (acc > best) {
        best = acc;
        best_l = li;
        best_k = ki;
      }
    }
  }
  report.best_lambda = lambdas[static_cast<std::size_t>(best_l)];
  report.best_k = ks[static_cast<std::size_t>(best_k)];
  report.best_accuracy = best;

  report.test_accuracy.assign(folds.size(), 0.0);
  parallel_for(config.trials, config.threads, [&](int t) {
    const Fold& fold = folds[static_cast<std::size_t>(t)];
    const PreparedModel prepared(fit(fold.train, report.best_lambda, report.best_k));
    report.test_accuracy[static_cast<std::size_t>(t)] =
        score(prepared, ClassifierKind::kSaCrc, fold.test, classes, config.lambda1, t).accuracy;
  });
  return report;
}

TimingTable bench_timing(const FittedModel& model, const Dataset& test,
                         const std::vector<ClassifierKind>& classifiers, int repetitions, double lambda1) {
  if (test.size() == 0) throw Error(Errc::kEmptyDataset, "timing needs at least one test sample");
  test.validate();
  if (repetitions < 1) throw Error(Errc::kInvalidArgument, "repetitions must be at least 1");

  PreparedModel prepared(FittedModel(model.dictionary(), model.projection(), model.gram(), model.lambda(),
                                     model.k()));
  prepared.prepare_for(classifiers);

  TimingTable table;
  table.atoms = model.dictionary().cols();
  table.classes = model.dictionary().partition().class_count();
  table.features = model.dictionary().rows();
  table.test_samples = test.size();
  table.k = model.k();
  table.lambda = model.lambda();

  const double n = static_cast<double>(test.size());
  for (const ClassifierKind kind : classifiers) {
    auto pass = [&] {
      Index sink = 0;
      const auto start = Clock::now();
      for (Index j = 0; j < test.size(); ++j) sink += prepared.classify(kind, test.features.col(j), lambda1).label;
      const auto stop = Clock::now();
      timing_sink = timing_sink + sink;
      return std::chrono::duration<double, std::milli>(stop - start).count() / n;
    };
    pass();
    std::vector<double> per_sample;
    for (int r = 0; r < repetitions; ++r) per_sample.push_back(pass());
    const double mean = mean_of(per_sample);
    std::sort(per_sample.begin(), per_sample.end());
    const std::size_t mid = per_sample.size() / 2;
    const double median = per_sample.size() % 2 == 1 ? per_sample[mid]
                                                     : 0.5 * (per_sample[mid - 1] + per_sample[mid]);
    table.rows.push_back(TimingRow{kind, repetitions, median, mean});
  }
  return table;
}

}  // namespace sacrc
