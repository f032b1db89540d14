#include "sacrc/error.hpp"
#include "sacrc/harness.hpp"
#include "sacrc/solvers.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace sacrc;

// SACRC_VERBOSE: 0 silent, 1 summaries (default), 2 also progress notes.
int verbosity() {
  const char* value = std::getenv("SACRC_VERBOSE");
  if (value == nullptr || *value == '\0') return 1;
  return std::atoi(value);
}

void note(int level, const std::string& text) {
  if (verbosity() >= level) std::cerr << text << '\n';
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot write " + path.string());
  out << text;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw Error(Errc::kInvalidArgument, "not a number: '" + text + "'");
  return value;
}

// "a,b,c" or "lo:hi:count" (log-spaced).
std::vector<double> parse_real_grid(const std::string& text) {
  const std::vector<std::string> range = split_list(text, ':');
  if (range.size() == 3) {
    return log_grid(to_double(range[0]), to_double(range[1]), static_cast<int>(to_double(range[2])));
  }
  std::vector<double> out;
  for (const std::string& item : split_list(text, ',')) out.push_back(to_double(item));
  return out;
}

std::vector<Index> parse_index_grid(const std::string& text) {
  std::vector<Index> out;
  for (const std::string& item : split_list(text, ',')) {
    const double value = to_double(item);
    if (value != std::floor(value)) throw Error(Errc::kInvalidArgument, "not an integer: '" + item + "'");
    out.push_back(static_cast<Index>(value));
  }
  return out;
}

// Flags shared by the dataset-driven subcommands. Each one overrides the
// config file or preset only when it was given.
struct ConfigFlags {
  std::string config_file;
  std::string preset_name;
  std::string dataset;
  std::string classifiers;
  double lambda = 0.0;
  Index k = 0;
  double lambda1 = 0.0;
  std::string train;
  int trials = 0;
  std::uint64_t seed = 0;
  Index projection_dim = 0;
  std::string delta_grid;
  Index trace_sample = -1;
  std::string out;
  int threads = 1;
  std::string lambda_grid;
  std::string k_grid;
  double sweep_fit_fraction = 0.5;
  int repetitions = 30;

  std::vector<CLI::Option*> options;

  void attach(CLI::App* app, bool seed_required) {
    auto add = [&](CLI::Option* option) { options.push_back(option); return option; };
    add(app->add_option("--config", config_file, "JSON config file; flags override it"));
    add(app->add_option("--preset", preset_name, "face, object or action"));
    add(app->add_option("--dataset", dataset, "CSV file or dataset manifest (.json)"));
    add(app->add_option("--classifiers", classifiers,
                        "comma list of residual, src, crc-rls, crc-rls-norm, sa-crc, sa-crc-rls, sa-crc-omp"));
    add(app->add_option("--lambda", lambda, "ridge regularization"));
    add(app->add_option("--k", k, "OMP sparsity"));
    add(app->add_option("--lambda1", lambda1, "l1 weight for src"));
    add(app->add_option("--train", train, "training samples per class: count, or fraction with a '.'"));
    add(app->add_option("--trials", trials, "number of random splits"));
    CLI::Option* seed_option = add(app->add_option("--seed", seed, "seed for splits and projections"));
    if (seed_required) seed_option->required();
    add(app->add_option("--projection-dim", projection_dim, "random-projection feature dimension (0 = off)"));
    add(app->add_option("--delta-grid", delta_grid, "sparsity grid: a,b,c or lo:hi:count"));
    add(app->add_option("--trace-sample", trace_sample, "test sample index for the coefficient trace"));
    add(app->add_option("--out", out, "output directory"));
    add(app->add_option("--threads", threads, "worker threads for trials"));
    add(app->add_option("--lambda-grid", lambda_grid, "sweep grid: a,b,c or lo:hi:count"));
    add(app->add_option("--k-grid", k_grid, "sweep grid: a,b,c"));
    add(app->add_option("--sweep-fit-fraction", sweep_fit_fraction, "share of training data fitted while sweeping"));
    add(app->add_option("--repetitions", repetitions, "timed passes for bench"));
  }

  bool given(const std::string& name) const {
    for (const CLI::Option* option : options) {
      if (option->check_lname(name.substr(2)) && option->count() > 0) return true;
    }
    return false;
  }

  ExperimentConfig resolve() const {
    ExperimentConfig config;
    if (given("--config")) config = config_from_json(read_text(config_file));
    if (given("--preset")) {
      ExperimentConfig base = preset(preset_name);
      config.lambda = base.lambda;
      config.k = base.k;
    }
    if (given("--dataset")) config.dataset = dataset;
    if (given("--classifiers")) {
      config.classifiers.clear();
      for (const std::string& name : split_list(classifiers, ',')) config.classifiers.push_back(parse_classifier(name));
    }
    if (given("--lambda")) config.lambda = lambda;
    if (given("--k")) config.k = k;
    if (given("--lambda1")) config.lambda1 = lambda1;
    if (given("--train")) {
      if (train.find('.') != std::string::npos) config.per_class_train = to_double(train);
      else config.per_class_train = parse_index_grid(train).at(0);
    }
    if (given("--trials")) config.trials = trials;
    if (given("--seed")) config.seed = seed;
    if (given("--projection-dim")) config.projection_dim = projection_dim;
    if (given("--delta-grid")) config.delta_grid = parse_real_grid(delta_grid);
    if (given("--trace-sample")) config.trace_sample = trace_sample;
    if (given("--out")) config.output_dir = out;
    if (given("--threads")) config.threads = threads;
    if (given("--lambda-grid")) config.lambda_grid = parse_real_grid(lambda_grid);
    if (given("--k-grid")) config.k_grid = parse_index_grid(k_grid);
    if (given("--sweep-fit-fraction")) config.sweep_fit_fraction = sweep_fit_fraction;
    if (given("--repetitions")) config.bench_repetitions = repetitions;
    config.validate();
    return config;
  }
};

std::filesystem::path output_dir(const ExperimentConfig& config) {
  const std::filesystem::path dir = config.output_dir.empty() ? "." : config.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::kIo, "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

int run_fit(const ConfigFlags& flags) {
  const ExperimentConfig config = flags.resolve();
  const Dataset dataset = prepare_dataset(config);
  const auto start = std::chrono::steady_clock::now();
  const FittedModel model = fit(dataset, config.lambda, config.k);
  const double fit_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  const double residual =
      normal_equation_residual(model.dictionary().atoms(), model.gram(), model.projection(), model.lambda());

  nlohmann::ordered_json doc;
  doc["schema"] = "sacrc.model/1";
  doc["atoms"] = model.dictionary().cols();
  doc["features"] = model.dictionary().rows();
  doc["classes"] = model.dictionary().partition().labels();
  doc["class_sizes"] = model.dictionary().partition().sizes();
  doc["lambda"] = model.lambda();
  doc["k"] = model.k();
  doc["normal_equation_residual"] = residual;
  const std::string text = doc.dump(2) + "\n";
  if (!config.output_dir.empty()) write_text(output_dir(config) / "model.json", text);
  if (verbosity() >= 1) std::cout << text;
  note(1, "fit time " + std::to_string(fit_ms) + " ms");
  return 0;
}

int run_eval(const ConfigFlags& flags) {
  const ExperimentConfig config = flags.resolve();
  note(2, "evaluating " + config.dataset);
  const BenchmarkReport report = evaluate(config);
  const std::filesystem::path dir = output_dir(config);
  write_text(dir / "report.json", report_json(report));
  write_text(dir / "report.txt", report_text(report));
  write_text(dir / "timing.json", timing_json(report));
  for (const auto& path : emit_plots(report, nullptr, dir)) note(2, "wrote " + path.string());
  for (const ClassifierReport& entry : report.classifiers) {
    for (const TrialResult& trial : entry.trials) {
      for (const std::string& failure : trial.failures) note(1, to_string(entry.kind) + ": " + failure);
    }
  }
  if (verbosity() >= 1) std::cout << report_text(report);
  return 0;
}

int run_sweep(const ConfigFlags& flags) {
  const ExperimentConfig config = flags.resolve();
  const SweepReport report = sweep(config);
  const std::filesystem::path dir = output_dir(config);
  write_text(dir / "sweep.json", sweep_json(report));
  write_text(dir / "sweep.txt", sweep_text(report));
  BenchmarkReport empty;
  emit_plots(empty, &report, dir);
  if (verbosity() >= 1) std::cout << sweep_text(report);
  return 0;
}

int run_bench(const ConfigFlags& flags) {
  const ExperimentConfig config = flags.resolve();
  const Dataset dataset = prepare_dataset(config);
  const Split parts = split(dataset, SplitSpec{config.per_class_train, config.seed, 1}, 0);
  const FittedModel model = fit(parts.train, config.lambda, config.k);
  const TimingTable table =
      bench_timing(model, parts.test, config.classifiers, config.bench_repetitions, config.lambda1);
  if (!config.output_dir.empty()) write_text(output_dir(config) / "bench.json", timing_table_json(table));
  if (verbosity() >= 1) std::cout << timing_table_text(table);
  return 0;
}

struct AnalyzeFlags {
  bool tie = false;
  Index m = 3;
  double delta = 1e-3;
  double perturbation = 0.0;
};

int run_analyze(const ConfigFlags& flags, const AnalyzeFlags& analyze) {
  if (analyze.tie) {
    const TieScenario scenario = build_tie_scenario(analyze.m, flags.seed, analyze.perturbation);
    const FittedModel model = make_model(scenario.dictionary, scenario.lambda, scenario.k);
    const ClassificationOutcome outcome = classify_sa_crc(model, scenario.y);
    nlohmann::ordered_json doc;
    doc["schema"] = "sacrc.tie/1";
    doc["dense_residuals"] = {scenario.dense_residuals(0), scenario.dense_residuals(1)};
    doc["residual_gap"] = std::abs(scenario.dense_residuals(0) - scenario.dense_residuals(1));
    doc["atoms_per_class"] = scenario.atoms_per_class;
    doc["omp_support_per_class"] = scenario.omp_support_per_class;
    doc["sa_crc_label"] = model.dictionary().partition().label(outcome.label);
    doc["fewer_atom_class"] = model.dictionary().partition().label(scenario.fewer_atom_class);
    if (!flags.out.empty()) {
      ExperimentConfig target;
      target.output_dir = flags.out;
      write_text(output_dir(target) / "analysis.json", doc.dump(2) + "\n");
    }
    if (verbosity() >= 1) std::cout << doc.dump(2) << '\n';
    return 0;
  }

  ExperimentConfig config = flags.resolve();
  if (config.delta_grid.empty()) config.delta_grid = log_grid(1e-6, 1e-1, 21);
  if (config.trace_sample < 0) config.trace_sample = 0;
  const Dataset dataset = prepare_dataset(config);
  const Split parts = split(dataset, SplitSpec{config.per_class_train, config.seed, 1}, 0);
  const FittedModel model = fit(parts.train, config.lambda, config.k);

  const ClassPartition& partition = model.dictionary().partition();
  Index holds = 0;
  Index checked = 0;
  Index positive = 0;
  Index nonzero = 0;
  for (Index j = 0; j < parts.test.size(); ++j) {
    try {
      const SaCrcOutcome detail = classify_sa_crc_detailed(model, parts.test.features.col(j));
      // Sign of the sparse coefficients on the true class.
      const Index truth = *partition.index_of(parts.test.labels[static_cast<std::size_t>(j)]);
      for (Index a = partition.offset(truth); a < partition.offset(truth) + partition.size(truth); ++a) {
        if (detail.sparse_code(a) != 0.0) {
          ++nonzero;
          if (detail.sparse_code(a) > 0.0) ++positive;
        }
      }
      if (partition.class_count() < 2) continue;
      const MarginReport margin = decision_margin_check(detail.outcome.scores, detail.outcome.representation.coefficients(),
                                                        partition, analyze.delta);
      ++checked;
      if (margin.holds) ++holds;
    } catch (const Error& e) {
      if (exit_code(e.code()) != 3) throw;
    }
  }

  ExperimentConfig one = config;
  one.trials = 1;
  one.classifiers = {ClassifierKind::kSaCrc};
  const BenchmarkReport report = evaluate(one, dataset);
  const std::filesystem::path dir = output_dir(config);
  emit_plots(report, nullptr, dir);

  nlohmann::ordered_json doc;
  doc["schema"] = "sacrc.analysis/1";
  doc["test_samples"] = parts.test.size();
  doc["margin_delta"] = analyze.delta;
  doc["margin_checked"] = checked;
  doc["margin_holds"] = holds;
  doc["augmented_below_dense"] = report.sparsity->augmented_below_dense;
  doc["true_class_sparse_nonzero"] = nonzero;
  doc["true_class_sparse_positive_share"] =
      nonzero > 0 ? static_cast<double>(positive) / static_cast<double>(nonzero) : 0.0;
  write_text(dir / "analysis.json", doc.dump(2) + "\n");
  if (verbosity() >= 1) std::cout << doc.dump(2) << '\n';
  return 0;
}

struct SynthFlags {
  SubspaceSpec spec;
  std::string out;
  std::string manifest;
};

void ensure_parent(const std::filesystem::path& file) {
  const std::filesystem::path parent = std::filesystem::absolute(file).parent_path();
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec) throw Error(Errc::kIo, "cannot create " + parent.string() + ": " + ec.message());
}

int run_synth(const SynthFlags& flags) {
  const Dataset dataset = synthetic_subspaces(flags.spec);
  ensure_parent(flags.out);
  save_csv(dataset, flags.out);
  if (!flags.manifest.empty()) {
    ensure_parent(flags.manifest);
    DatasetManifest manifest = make_manifest(dataset, flags.out);
    const std::filesystem::path manifest_dir = std::filesystem::absolute(flags.manifest).parent_path();
    manifest.path = std::filesystem::absolute(flags.out).lexically_relative(manifest_dir).string();
    write_manifest(manifest, flags.manifest);
  }
  note(1, "wrote " + std::to_string(dataset.size()) + " samples to " + flags.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collaborative-representation classifiers and benchmark harness"};
  app.require_subcommand(1);

  ConfigFlags fit_flags, eval_flags, sweep_flags, bench_flags, analyze_flags;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a model on a whole dataset and check it");
  fit_flags.attach(fit_cmd, false);
  CLI::App* eval_cmd = app.add_subcommand("eval", "accuracy over repeated random splits");
  eval_flags.attach(eval_cmd, true);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "two-stage lambda/k search");
  sweep_flags.attach(sweep_cmd, true);
  CLI::App* bench_cmd = app.add_subcommand("bench", "per-sample classification time");
  bench_flags.attach(bench_cmd, false);
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "sparsity curves, margins, tie scenario");
  analyze_flags.attach(analyze_cmd, false);
  AnalyzeFlags analyze;
  analyze_cmd->add_flag("--tie-scenario", analyze.tie, "build the equal-residual two-class scenario");
  analyze_cmd->add_option("--m", analyze.m, "feature dimension of the tie scenario");
  analyze_cmd->add_option("--margin-delta", analyze.delta, "delta for the decision-margin check");
  analyze_cmd->add_option("--perturbation", analyze.perturbation, "relative tie-breaking perturbation");

  SynthFlags synth;
  std::uint64_t synth_seed = 0;
  CLI::App* synth_cmd = app.add_subcommand("synth", "write a synthetic union-of-subspaces dataset");
  synth_cmd->add_option("--seed", synth_seed, "generator seed")->required();
  synth_cmd->add_option("--classes", synth.spec.classes, "number of classes");
  synth_cmd->add_option("--per-class", synth.spec.per_class, "samples per class");
  synth_cmd->add_option("--dim", synth.spec.dimension, "feature dimension");
  synth_cmd->add_option("--subspace-dim", synth.spec.subspace_dim, "dimension of each class subspace");
  synth_cmd->add_option("--sigma", synth.spec.noise_sigma, "noise standard deviation");
  synth_cmd->add_option("--overlap", synth.spec.overlap, "shared basis fraction between consecutive classes");
  synth_cmd->add_option("--out", synth.out, "CSV output path")->required();
  synth_cmd->add_option("--manifest", synth.manifest, "also write a manifest here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*fit_cmd) return run_fit(fit_flags);
    if (*eval_cmd) return run_eval(eval_flags);
    if (*sweep_cmd) return run_sweep(sweep_flags);
    if (*bench_cmd) return run_bench(bench_flags);
    if (*analyze_cmd) return run_analyze(analyze_flags, analyze);
    if (*synth_cmd) {
      synth.spec.seed = synth_seed;
      return run_synth(synth);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
