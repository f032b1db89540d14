#include "sacrc/error.hpp"
#include "sacrc/harness.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace sacrc;
using namespace sacrc::testing;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Dataset fixture() {
  return synthetic_subspaces(SubspaceSpec{5, 12, 20, 3, 0.05, 0.3, SubspaceCoordinates::kHalfNormal, 4});
}

ExperimentConfig fixture_config() {
  ExperimentConfig config;
  config.classifiers = all_classifiers();
  config.lambda = 0.01;
  config.k = 3;
  config.per_class_train = Index{6};
  config.trials = 3;
  config.seed = 11;
  return config;
}

}  // namespace

TEST_CASE("classifier names round trip") {
  for (const ClassifierKind kind : all_classifiers()) CHECK(parse_classifier(to_string(kind)) == kind);
  CHECK(all_classifiers().size() == 7);
  CHECK_THROWS_AS(parse_classifier("knn"), Error);
}

TEST_CASE("presets and json config") {
  const ExperimentConfig face = preset("face");
  CHECK(face.lambda == 0.003);
  CHECK(face.k == 50);
  CHECK(preset("object").lambda == 1.0);
  CHECK(preset("action").lambda == 0.01);
  CHECK_THROWS_AS(preset("speech"), Error);

  const ExperimentConfig parsed = config_from_json(R"({"preset": "object", "k": 7, "trials": 2})");
  CHECK(parsed.lambda == 1.0);
  CHECK(parsed.k == 7);
  CHECK(parsed.trials == 2);
  CHECK_THROWS_AS(config_from_json(R"({"lamda": 1})"), Error);

  ExperimentConfig config = fixture_config();
  config.per_class_train = 0.25;
  config.delta_grid = {1e-4, 1e-2};
  const ExperimentConfig back = config_from_json(config_to_json(config));
  CHECK(config_to_json(back) == config_to_json(config));
  CHECK(std::get<double>(back.per_class_train) == 0.25);

  config.trials = 0;
  CHECK_THROWS_AS(config.validate(), Error);
}

TEST_CASE("a classifier stuck on the first class scores one over the class count") {
  // Identical samples everywhere: the pursuit takes the first atom, which
  // belongs to the first class, so every prediction is class 0.
  Dataset d;
  d.features = Matrix::Ones(1, 12);
  for (int c = 0; c < 4; ++c) {
    for (int j = 0; j < 3; ++j) d.labels.push_back("k" + std::to_string(c));
  }
  ExperimentConfig config;
  config.classifiers = {ClassifierKind::kSaCrc};
  config.k = 1;
  config.lambda = 0.1;
  config.per_class_train = Index{1};
  config.trials = 2;
  const BenchmarkReport report = evaluate(config, d);
  const ClassifierReport& r = report.classifiers.front();
  CHECK(r.mean_accuracy == 0.25);
  REQUIRE(r.std_accuracy.has_value());
  CHECK(*r.std_accuracy == 0.0);
  for (std::size_t a = 0; a < 4; ++a) CHECK(r.confusion[a][0] == 4);
}

TEST_CASE("evaluation accounts for every test sample and is deterministic") {
  const Dataset d = fixture();
  ExperimentConfig config = fixture_config();
  const BenchmarkReport a = evaluate(config, d);
  REQUIRE(a.classifiers.size() == 7);
  for (const ClassifierReport& r : a.classifiers) {
    REQUIRE(r.trials.size() == 3);
    double sum = 0.0;
    for (const TrialResult& t : r.trials) {
      CHECK(t.correct + t.incorrect + t.failed == 30);
      CHECK(t.accuracy == static_cast<double>(t.correct) / 30.0);
      sum += t.accuracy;
    }
    CHECK(r.mean_accuracy == doctest::Approx(sum / 3.0));
    CHECK(r.mean_accuracy > 0.5);
  }
  config.threads = 3;
  const BenchmarkReport b = evaluate(config, d);
  CHECK(report_json(a) == report_json(b));
  CHECK(report_json(a) == report_json(evaluate(fixture_config(), d)));
}

TEST_CASE("numerical failures are counted, not fatal") {
  Dataset d = fixture();
  const SplitSpec spec{Index{6}, 11, 1};
  const Index zero_column = split(d, spec, 0).test_indices.front();
  d.features.col(zero_column).setZero();

  ExperimentConfig config = fixture_config();
  config.trials = 1;
  config.classifiers = {ClassifierKind::kSaCrc, ClassifierKind::kCrcRls};
  const BenchmarkReport report = evaluate(config, d);
  const TrialResult& sa = report.classifiers[0].trials[0];
  CHECK(sa.failed == 1);
  REQUIRE(sa.failures.size() == 1);
  CHECK(sa.failures[0].find("DegenerateSum") != std::string::npos);
  CHECK(sa.correct + sa.incorrect == 29);
  CHECK(report.classifiers[1].trials[0].failed == 0);
}

TEST_CASE("a singular unregularized fit is a numerical error") {
  ExperimentConfig config = fixture_config();
  config.lambda = 0.0;
  config.per_class_train = Index{6};  // 30 atoms in 20 dimensions
  try {
    evaluate(config, fixture());
    FAIL("expected SingularGram");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kSingularGram);
    CHECK(exit_code(e.code()) == 3);
  }
}

TEST_CASE("diagnostics: sparsity curves and coefficient trace") {
  ExperimentConfig config = fixture_config();
  config.classifiers = {ClassifierKind::kSaCrc};
  config.delta_grid = log_grid(1e-6, 1e-1, 11);
  config.trace_sample = 4;
  const BenchmarkReport report = evaluate(config, fixture());
  REQUIRE(report.sparsity.has_value());
  const SparsityCurves& curves = *report.sparsity;
  CHECK(curves.dense.front() <= 30.0);
  for (std::size_t g = 1; g < curves.deltas.size(); ++g) {
    CHECK(curves.dense[g] <= curves.dense[g - 1]);
    CHECK(curves.augmented[g] <= curves.augmented[g - 1]);
  }
  for (const double s : curves.sparse) CHECK(s <= 3.0);
  CHECK(curves.augmented_below_dense >= 0.0);
  CHECK(curves.augmented_below_dense <= 1.0);

  REQUIRE(report.coefficient_trace.has_value());
  const CoefficientTrace& trace = *report.coefficient_trace;
  CHECK(trace.sample == 4);
  CHECK(trace.augmented.size() == 30);
  CHECK(trace.atom_classes.size() == 30);
  CHECK(std::abs(trace.augmented.norm() - 1.0) < 1e-12);
  const Vector sum = trace.sparse + trace.dense;
  CHECK((trace.augmented - sum / sum.norm()).norm() < 1e-12);

  config.trace_sample = 1000;
  CHECK_THROWS_AS(evaluate(config, fixture()), Error);
}

TEST_CASE("sweep with one candidate per axis") {
  ExperimentConfig config = fixture_config();
  config.lambda_grid = {0.01};
  config.k_grid = {2};
  const SweepReport report = sweep(config, fixture());
  REQUIRE(report.points.size() == 2);
  CHECK(report.points[0].stage == SweepStage::kLambda);
  CHECK(report.points[0].k_index == -1);
  CHECK(report.points[1].stage == SweepStage::kSparsity);
  CHECK(report.best_lambda == 0.01);
  CHECK(report.best_k == 2);
  CHECK(report.best_accuracy == report.points[1].accuracy);
  CHECK(report.test_accuracy.size() == 3);

  config.lambda_grid.clear();
  try {
    sweep(config, fixture());
    FAIL("expected EmptyGrid");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kEmptyGrid);
  }
  config.lambda_grid = {0.01};
  config.k_grid = {100};
  CHECK_THROWS_AS(sweep(config, fixture()), Error);
}

TEST_CASE("sweep stages follow the grid") {
  ExperimentConfig config = fixture_config();
  config.lambda_grid = {1e-4, 1e-2, 1.0};
  config.k_grid = {1, 2, 3};
  const SweepReport report = sweep(config, fixture());
  Index stage1 = 0, stage2 = 0;
  double best_stage1 = -1.0, lambda_star = 0.0;
  for (const SweepPoint& p : report.points) {
    if (p.stage == SweepStage::kLambda) {
      ++stage1;
      if (p.accuracy > best_stage1) {
        best_stage1 = p.accuracy;
        lambda_star = p.lambda;
      }
    }
  }
  for (const SweepPoint& p : report.points) {
    if (p.stage == SweepStage::kSparsity) {
      ++stage2;
      CHECK(p.lambda == lambda_star);
    }
  }
  CHECK(stage1 == 3);
  CHECK(stage2 == 3);
  double best = 0.0;
  for (const SweepPoint& p : report.points) {
    if (p.stage != SweepStage::kLambda) best = std::max(best, p.accuracy);
  }
  CHECK(report.best_accuracy == best);
  CHECK(sweep_json(report) == sweep_json(sweep(config, fixture())));
}

TEST_CASE("plot files match the golden copies") {
  BenchmarkReport report;
  report.sparsity = SparsityCurves{{1e-6, 1e-3, 0.1}, {40, 12.25, 1}, {5, 4, 1}, {38.5, 3, 0.5}, 0.5};
  Vector sparse(3), dense(3), augmented(3);
  sparse << 0.5, 0.0, -1.0;
  dense << 0.25, -0.125, 0.0625;
  augmented << 0.6, -0.1, -0.8;
  report.coefficient_trace = CoefficientTrace{0, "a", {"a", "a", "b"}, sparse, dense, augmented};
  SweepReport table;
  table.points = {{SweepStage::kLambda, 1e-3, 0, 0, -1, 0.75},
                  {SweepStage::kLambda, 1e-2, 0, 1, -1, 0.8},
                  {SweepStage::kSparsity, 1e-2, 5, 1, 0, 0.9},
                  {SweepStage::kRefine, 1e-3, 5, 0, 0, 0.85}};

  const fs::path dir = scratch_dir("plots") / "out";
  const auto written = emit_plots(report, &table, dir);
  CHECK(written.size() == 3);
  for (const char* name : {"sparsity_curves.csv", "coefficient_trace.csv", "sweep.csv"}) {
    CHECK_MESSAGE(slurp(dir / name) == slurp(fs::path(SACRC_GOLDEN_DIR) / name), name);
  }
}

TEST_CASE("no diagnostics, no files") {
  const fs::path dir = scratch_dir("no_plots") / "out";
  CHECK(emit_plots(BenchmarkReport{}, nullptr, dir).empty());
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("timing table covers every classifier") {
  const Dataset d = fixture();
  const Split parts = split(d, SplitSpec{Index{6}, 1, 1});
  const FittedModel model = fit(parts.train, 0.01, 3);
  const TimingTable table =
      bench_timing(model, parts.test, {ClassifierKind::kSaCrc, ClassifierKind::kCrcRls}, 3);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.atoms == 30);
  CHECK(table.test_samples == 30);
  for (const TimingRow& row : table.rows) {
    CHECK(row.repetitions == 3);
    CHECK(row.median_ms > 0.0);
  }
  Dataset empty;
  empty.features.resize(20, 0);
  CHECK_THROWS_AS(bench_timing(model, empty, {ClassifierKind::kSaCrc}, 1), Error);
}

TEST_CASE("fit groups classes and matches classify_with") {
  const Dataset d = fixture();
  const Split parts = split(d, SplitSpec{Index{6}, 2, 1});
  const FittedModel model = fit(parts.train, 0.01, 3);
  CHECK(model.dictionary().partition().labels() == parts.train.classes());
  const Vector y = parts.test.features.col(0);
  CHECK(classify_with(ClassifierKind::kSaCrc, model, y, 1e-3).label == classify_sa_crc(model, y).label);
  CHECK(classify_with(ClassifierKind::kCrcRls, model, y, 1e-3).label == classify_crc_rls(model, y).label);
}

TEST_CASE("fixture sweep recommends a point at least as good as every stage-1 point") {
  const Dataset d =
      normalize_columns(synthetic_subspaces(SubspaceSpec{10, 40, 50, 5, 0.05, 0.6, SubspaceCoordinates::kHalfNormal, 7}));
  ExperimentConfig config;
  config.per_class_train = Index{20};
  config.trials = 10;
  config.seed = 1;
  config.lambda_grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  config.k_grid = {5, 10, 20, 50, 100};
  const SweepReport report = sweep(config, d);
  for (const SweepPoint& p : report.points) {
    if (p.stage == SweepStage::kLambda) CHECK(report.best_accuracy >= p.accuracy);
  }
  CHECK(report.best_lambda == 1.0);
  CHECK(report.best_k == 5);
}
