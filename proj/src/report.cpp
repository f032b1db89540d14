#include "sacrc/error.hpp"
#include "sacrc/harness.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sacrc {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kReportSchema = "sacrc.report/1";
constexpr const char* kSweepSchema = "sacrc.sweep/1";
constexpr const char* kTimingSchema = "sacrc.timing/1";

std::string number(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

std::string fixed(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
  return buffer;
}

json config_json(const ExperimentConfig& config) {
  json doc = json::parse(config_to_json(config));
  doc.erase("output_dir");
  doc.erase("threads");
  return doc;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

// Columns padded to their widest cell; the first column is left-aligned.
std::string aligned(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string pad(width[c] - row[c].size(), ' ');
      if (c > 0) line += "  ";
      line += c == 0 ? row[c] + pad : pad + row[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::kIo, "write failed for " + path.string());
}

const char* stage_name(SweepStage stage) {
  switch (stage) {
    case SweepStage::kLambda: return "lambda";
    case SweepStage::kSparsity: return "k";
    case SweepStage::kRefine: return "refine";
  }
  return "unknown";
}

}  // namespace

std::string report_json(const BenchmarkReport& report) {
  json doc;
  doc["schema"] = kReportSchema;
  doc["config"] = config_json(report.config);
  doc["dataset"] = {{"samples", report.samples}, {"features", report.features}, {"classes", report.classes}};
  json classifiers = json::array();
  for (const ClassifierReport& entry : report.classifiers) {
    json item;
    item["classifier"] = to_string(entry.kind);
    item["mean_accuracy"] = entry.mean_accuracy;
    if (entry.std_accuracy) item["std_accuracy"] = *entry.std_accuracy;
    json trials = json::array();
    for (const TrialResult& trial : entry.trials) {
      trials.push_back({{"trial", trial.trial},
                        {"accuracy", trial.accuracy},
                        {"correct", trial.correct},
                        {"incorrect", trial.incorrect},
                        {"failed", trial.failed},
                        {"failures", trial.failures}});
    }
    item["trials"] = std::move(trials);
    item["confusion"] = entry.confusion;
    classifiers.push_back(std::move(item));
  }
  doc["classifiers"] = std::move(classifiers);
  if (report.sparsity) {
    const SparsityCurves& curves = *report.sparsity;
    doc["sparsity"] = {{"delta", curves.deltas},
                       {"dense", curves.dense},
                       {"sparse", curves.sparse},
                       {"augmented", curves.augmented},
                       {"augmented_below_dense", curves.augmented_below_dense}};
  }
  if (report.coefficient_trace) {
    const CoefficientTrace& trace = *report.coefficient_trace;
    doc["coefficient_trace"] = {{"sample", trace.sample},
                                {"label", trace.label},
                                {"atom_classes", trace.atom_classes},
                                {"sparse", vector_json(trace.sparse)},
                                {"dense", vector_json(trace.dense)},
                                {"augmented", vector_json(trace.augmented)}};
  }
  return doc.dump(2) + "\n";
}

std::string timing_json(const BenchmarkReport& report) {
  json doc;
  doc["schema"] = kTimingSchema;
  json rows = json::array();
  for (const ClassifierReport& entry : report.classifiers) {
    json per_trial = json::array();
    for (const TrialResult& trial : entry.trials) {
      per_trial.push_back(std::chrono::duration<double, std::milli>(trial.classify_time).count());
    }
    rows.push_back({{"classifier", to_string(entry.kind)},
                    {"mean_sample_ms", entry.mean_sample_time_ms},
                    {"trial_total_ms", per_trial}});
  }
  doc["classifiers"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string report_text(const BenchmarkReport& report) {
  std::vector<std::vector<std::string>> rows{{"classifier", "accuracy", "std", "failed"}};
  for (const ClassifierReport& entry : report.classifiers) {
    Index failed = 0;
    for (const TrialResult& trial : entry.trials) failed += trial.failed;
    rows.push_back({to_string(entry.kind), fixed(100.0 * entry.mean_accuracy, 2),
                    entry.std_accuracy ? fixed(100.0 * *entry.std_accuracy, 2) : "-", std::to_string(failed)});
  }
  std::ostringstream out;
  out << report.samples << " samples, " << report.features << " features, " << report.classes.size()
      << " classes, " << report.config.trials << " trial(s), lambda " << number(report.config.lambda)
      << ", k " << report.config.k << "\n\n";
  out << aligned(rows);
  return out.str();
}

std::string sweep_json(const SweepReport& report) {
  json doc;
  doc["schema"] = kSweepSchema;
  doc["config"] = config_json(report.config);
  json points = json::array();
  for (const SweepPoint& point : report.points) {
    json item{{"stage", stage_name(point.stage)}, {"lambda", point.lambda}};
    if (point.k_index >= 0) item["k"] = point.k;
    item["accuracy"] = point.accuracy;
    points.push_back(std::move(item));
  }
  doc["points"] = std::move(points);
  doc["recommended"] = {{"lambda", report.best_lambda},
                        {"k", report.best_k},
                        {"validation_accuracy", report.best_accuracy}};
  doc["test_accuracy"] = report.test_accuracy;
  return doc.dump(2) + "\n";
}

std::string sweep_text(const SweepReport& report) {
  std::vector<std::vector<std::string>> rows{{"stage", "lambda", "k", "accuracy"}};
  for (const SweepPoint& point : report.points) {
    rows.push_back({stage_name(point.stage), number(point.lambda),
                    point.k_index >= 0 ? std::to_string(point.k) : "-", fixed(100.0 * point.accuracy, 2)});
  }
  std::ostringstream out;
  out << aligned(rows) << "\nrecommended lambda " << number(report.best_lambda) << ", k " << report.best_k
      << " (validation " << fixed(100.0 * report.best_accuracy, 2) << "%)\n";
  return out.str();
}

std::string timing_table_json(const TimingTable& table) {
  json doc;
  doc["schema"] = kTimingSchema;
  doc["atoms"] = table.atoms;
  doc["classes"] = table.classes;
  doc["features"] = table.features;
  doc["test_samples"] = table.test_samples;
  doc["lambda"] = table.lambda;
  doc["k"] = table.k;
  json rows = json::array();
  for (const TimingRow& row : table.rows) {
    rows.push_back({{"classifier", to_string(row.kind)},
                    {"repetitions", row.repetitions},
                    {"median_ms", row.median_ms},
                    {"mean_ms", row.mean_ms}});
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string timing_table_text(const TimingTable& table) {
  std::vector<std::vector<std::string>> rows{{"classifier", "median ms", "mean ms", "reps"}};
  for (const TimingRow& row : table.rows) {
    rows.push_back({to_string(row.kind), fixed(row.median_ms, 4), fixed(row.mean_ms, 4),
                    std::to_string(row.repetitions)});
  }
  std::ostringstream out;
  out << table.atoms << " atoms, " << table.classes << " classes, " << table.features << " features, "
      << table.test_samples << " test samples, lambda " << number(table.lambda) << ", k " << table.k
      << "\n\n"
      << aligned(rows);
  return out.str();
}

std::vector<std::filesystem::path> emit_plots(const BenchmarkReport& report, const SweepReport* sweep_report,
                                              const std::filesystem::path& outdir) {
  const bool curves = report.sparsity.has_value();
  const bool trace = report.coefficient_trace.has_value();
  const bool table = sweep_report != nullptr && !sweep_report->points.empty();
  std::vector<std::filesystem::path> written;
  if (!curves && !trace && !table) return written;

  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw Error(Errc::kIo, "cannot create " + outdir.string() + ": " + ec.message());

  if (curves) {
    const SparsityCurves& data = *report.sparsity;
    std::string text = "delta,dense,sparse,augmented\n";
    for (std::size_t g = 0; g < data.deltas.size(); ++g) {
      text += number(data.deltas[g]) + "," + number(data.dense[g]) + "," + number(data.sparse[g]) + "," +
              number(data.augmented[g]) + "\n";
    }
    written.push_back(outdir / "sparsity_curves.csv");
    write_file(written.back(), text);
  }
  if (trace) {
    const CoefficientTrace& data = *report.coefficient_trace;
    std::string text = "index,class,sparse,dense,augmented\n";
    for (Index j = 0; j < data.augmented.size(); ++j) {
      text += std::to_string(j) + "," + data.atom_classes[static_cast<std::size_t>(j)] + "," +
              number(data.sparse(j)) + "," + number(data.dense(j)) + "," + number(data.augmented(j)) + "\n";
    }
    written.push_back(outdir / "coefficient_trace.csv");
    write_file(written.back(), text);
  }
  if (table) {
    std::string text = "stage,lambda,k,accuracy\n";
    for (const SweepPoint& point : sweep_report->points) {
      text += std::string(stage_name(point.stage)) + "," + number(point.lambda) + "," +
              (point.k_index >= 0 ? std::to_string(point.k) : "") + "," + number(point.accuracy) + "\n";
    }
    written.push_back(outdir / "sweep.csv");
    write_file(written.back(), text);
  }
  return written;
}

}  // namespace sacrc
