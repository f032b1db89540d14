#include "sacrc/data.hpp"

#include "sacrc/error.hpp"
#include "sacrc/random.hpp"

#include <Eigen/QR>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

namespace sacrc {

namespace {

constexpr const char* kManifestSchema = "sacrc.dataset/1";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

Error parse_error(const std::filesystem::path& path, std::size_t line, std::size_t column,
                  const std::string& what) {
  return Error(Errc::kParseError, path.string() + ": line " + std::to_string(line) + ", column " +
                                      std::to_string(column) + ": " + what);
}

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

Dataset select_columns(const Dataset& dataset, const std::vector<Index>& columns) {
  Dataset out;
  out.features.resize(dataset.dimension(), static_cast<Index>(columns.size()));
  out.labels.reserve(columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.features.col(static_cast<Index>(j)) = dataset.features.col(columns[j]);
    out.labels.push_back(dataset.labels[static_cast<std::size_t>(columns[j])]);
  }
  return out;
}

Matrix orthonormal_columns(const Matrix& a) {
  return a.householderQr().householderQ() * Matrix::Identity(a.rows(), a.cols());
}

}  // namespace

std::vector<std::string> Dataset::classes() const {
  std::vector<std::string> out;
  std::unordered_map<std::string, std::size_t> seen;
  for (const std::string& label : labels) {
    if (seen.emplace(label, out.size()).second) out.push_back(label);
  }
  return out;
}

std::vector<Index> Dataset::class_counts() const {
  std::vector<Index> counts;
  std::unordered_map<std::string, std::size_t> slot;
  for (const std::string& label : labels) {
    auto [it, inserted] = slot.emplace(label, counts.size());
    if (inserted) counts.push_back(0);
    ++counts[it->second];
  }
  return counts;
}

void Dataset::validate() const {
  if (static_cast<Index>(labels.size()) != features.cols()) {
    throw Error(Errc::kDimensionMismatch, std::to_string(labels.size()) + " labels for " +
                                              std::to_string(features.cols()) + " samples");
  }
  if (features.cols() == 0) throw Error(Errc::kEmptyDataset, "dataset has no samples");
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());

  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      width = split_fields(line).size();
      break;
    }
  }
  if (width == 0) throw Error(Errc::kEmptyDataset, path.string() + ": no header row");
  if (width < 2) throw parse_error(path, line_no, 1, "header needs a label and at least one feature");
  const std::size_t m = width - 1;

  std::vector<double> values;
  std::vector<std::string> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string_view> fields = split_fields(line);
    if (fields.size() != width) {
      throw parse_error(path, line_no, std::min(fields.size(), width) + 1,
                        "expected " + std::to_string(width) + " fields, found " +
                            std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw parse_error(path, line_no, 1, "empty label");
    labels.emplace_back(fields[0]);
    for (std::size_t j = 1; j < width; ++j) {
      const std::string_view field = fields[j];
      double value = 0.0;
      const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || result.ec != std::errc{} || result.ptr != field.data() + field.size() ||
          !std::isfinite(value)) {
        throw parse_error(path, line_no, j + 1,
                          field.empty() ? "missing value" : "not a number: '" + std::string(field) + "'");
      }
      values.push_back(value);
    }
  }
  if (labels.empty()) throw Error(Errc::kEmptyDataset, path.string() + ": no samples");

  Dataset dataset;
  dataset.labels = std::move(labels);
  const Index n = static_cast<Index>(dataset.labels.size());
  dataset.features =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>>(
          values.data(), static_cast<Index>(m), n);
  return dataset;
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
  dataset.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot write " + path.string());
  out << "label";
  for (Index i = 0; i < dataset.dimension(); ++i) out << ",f" << i;
  out << '\n';
  for (Index j = 0; j < dataset.size(); ++j) {
    const std::string& label = dataset.labels[static_cast<std::size_t>(j)];
    if (label.empty() || label.find_first_of(",\n\r") != std::string::npos) {
      throw Error(Errc::kInvalidArgument, "label cannot be written to CSV: '" + label + "'");
    }
    out << label;
    for (Index i = 0; i < dataset.dimension(); ++i) out << ',' << format_double(dataset.features(i, j));
    out << '\n';
  }
  if (!out) throw Error(Errc::kIo, "write failed for " + path.string());
}

Dataset normalize_columns(const Dataset& dataset) {
  dataset.validate();
  Dataset out = dataset;
  for (Index j = 0; j < out.size(); ++j) {
    const double norm = out.features.col(j).norm();
    if (!(norm > 0.0)) {
      throw Error(Errc::kZeroSample, "sample " + std::to_string(j) + " is a zero vector");
    }
    out.features.col(j) /= norm;
  }
  return out;
}

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  Matrix out(rows, cols);
  // Row-major draw order, so the leading rows do not depend on the row count.
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) out(i, j) = rng.normal();
  }
  return out;
}

Dataset random_projection(const Dataset& dataset, Index d, std::uint64_t seed) {
  if (d < 1) throw Error(Errc::kInvalidArgument, "projection dimension must be at least 1");
  return random_projection(dataset, gaussian_matrix(d, dataset.dimension(), seed, 0));
}

Dataset random_projection(const Dataset& dataset, const Matrix& projection) {
  dataset.validate();
  if (projection.cols() != dataset.dimension() || projection.rows() < 1) {
    throw Error(Errc::kDimensionMismatch, "projection is " + std::to_string(projection.rows()) + "x" +
                                              std::to_string(projection.cols()) + " for " +
                                              std::to_string(dataset.dimension()) + " features");
  }
  return Dataset{projection * dataset.features, dataset.labels};
}

Split split(const Dataset& dataset, const SplitSpec& spec, int trial) {
  dataset.validate();
  const std::vector<std::string> classes = dataset.classes();
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t c = 0; c < classes.size(); ++c) slot.emplace(classes[c], c);
  std::vector<std::vector<Index>> members(classes.size());
  for (Index j = 0; j < dataset.size(); ++j) {
    members[slot.at(dataset.labels[static_cast<std::size_t>(j)])].push_back(j);
  }

  CounterRng rng(spec.seed, static_cast<std::uint64_t>(trial));
  std::vector<char> is_train(static_cast<std::size_t>(dataset.size()), 0);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<Index>& group = members[c];
    const Index size = static_cast<Index>(group.size());
    Index n_train = 0;
    if (const Index* count = std::get_if<Index>(&spec.per_class_train)) {
      n_train = *count;
    } else {
      const double fraction = std::get<double>(spec.per_class_train);
      if (!(fraction > 0.0 && fraction < 1.0)) {
        throw Error(Errc::kInvalidArgument, "training fraction must lie in (0, 1)");
      }
      n_train = static_cast<Index>(std::floor(fraction * static_cast<double>(size)));
    }
    if (n_train < 1 || n_train >= size) {
      throw Error(Errc::kInvalidArgument, "class '" + classes[c] + "' has " + std::to_string(size) +
                                              " samples, cannot train on " + std::to_string(n_train));
    }
    for (std::size_t i = group.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
      std::swap(group[i], group[j]);
    }
    for (Index i = 0; i < n_train; ++i) is_train[static_cast<std::size_t>(group[static_cast<std::size_t>(i)])] = 1;
  }

  Split out;
  for (Index j = 0; j < dataset.size(); ++j) {
    (is_train[static_cast<std::size_t>(j)] ? out.train_indices : out.test_indices).push_back(j);
  }
  out.train = select_columns(dataset, out.train_indices);
  out.test = select_columns(dataset, out.test_indices);
  return out;
}

namespace {

void check_subspace_spec(const SubspaceSpec& spec) {
  if (spec.classes < 1 || spec.per_class < 1 || spec.dimension < 1 || spec.subspace_dim < 1) {
    throw Error(Errc::kInvalidArgument, "synthetic sizes must be positive");
  }
  if (spec.subspace_dim > spec.dimension) {
    throw Error(Errc::kInvalidArgument, "subspace dimension exceeds feature dimension");
  }
  if (!(spec.overlap >= 0.0 && spec.overlap <= 1.0)) {
    throw Error(Errc::kInvalidArgument, "overlap must lie in [0, 1]");
  }
  if (!(spec.noise_sigma >= 0.0)) throw Error(Errc::kInvalidArgument, "noise sigma must be nonnegative");
}

// Streams: 2c generates class c's fresh directions, 2c+1 its samples.
Matrix next_directions(const SubspaceSpec& spec, Index cls, const Matrix& previous) {
  const Index shared = static_cast<Index>(std::lround(spec.overlap * static_cast<double>(spec.subspace_dim)));
  const Index inherited = cls == 0 ? 0 : shared;
  const Index fresh = spec.subspace_dim - inherited;
  Matrix next(spec.dimension, spec.subspace_dim);
  if (inherited > 0) next.leftCols(inherited) = previous.rightCols(inherited);
  if (fresh > 0) {
    next.rightCols(fresh) =
        gaussian_matrix(fresh, spec.dimension, spec.seed, 2 * static_cast<std::uint64_t>(cls)).transpose();
  }
  return next;
}

}  // namespace

Matrix synthetic_basis(const SubspaceSpec& spec, Index cls) {
  check_subspace_spec(spec);
  if (cls < 0 || cls >= spec.classes) throw Error(Errc::kInvalidArgument, "class index out of range");
  Matrix directions;
  for (Index c = 0; c <= cls; ++c) directions = next_directions(spec, c, directions);
  return orthonormal_columns(directions);
}

Dataset synthetic_subspaces(const SubspaceSpec& spec) {
  check_subspace_spec(spec);
  Dataset out;
  out.features.resize(spec.dimension, spec.classes * spec.per_class);
  out.labels.reserve(static_cast<std::size_t>(spec.classes * spec.per_class));
  Matrix directions;
  for (Index c = 0; c < spec.classes; ++c) {
    directions = next_directions(spec, c, directions);
    const Matrix basis = orthonormal_columns(directions);

    CounterRng rng(spec.seed, 2 * static_cast<std::uint64_t>(c) + 1);
    const std::string label = "c" + std::to_string(c);
    for (Index s = 0; s < spec.per_class; ++s) {
      Vector z(spec.subspace_dim);
      for (Index i = 0; i < spec.subspace_dim; ++i) {
        z(i) = spec.coordinates == SubspaceCoordinates::kHalfNormal ? std::abs(rng.normal()) : rng.normal();
      }
      Vector x = basis * z;
      for (Index i = 0; i < spec.dimension; ++i) x(i) += spec.noise_sigma * rng.normal();
      const double norm = x.norm();
      if (!(norm > 0.0)) throw Error(Errc::kZeroSample, "synthetic sample is a zero vector");
      out.features.col(c * spec.per_class + s) = x / norm;
      out.labels.push_back(label);
    }
  }
  return out;
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[1 << 16];
  while (in) {
    in.read(buffer, sizeof buffer);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << hash;
  return hex.str();
}

DatasetManifest make_manifest(const Dataset& dataset, const std::filesystem::path& csv_path) {
  dataset.validate();
  return DatasetManifest{csv_path.string(), dataset.size(), dataset.dimension(), dataset.classes(),
                         dataset.class_counts(), file_checksum(csv_path)};
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["schema"] = kManifestSchema;
  doc["path"] = manifest.path;
  doc["samples"] = manifest.samples;
  doc["features"] = manifest.features;
  doc["classes"] = manifest.classes;
  doc["class_counts"] = manifest.class_counts;
  doc["checksum"] = {{"algorithm", "fnv1a64"}, {"value", manifest.checksum}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());
  try {
    const nlohmann::json doc = nlohmann::json::parse(in);
    if (doc.at("schema").get<std::string>() != kManifestSchema) {
      throw Error(Errc::kParseError, path.string() + ": unsupported manifest schema");
    }
    if (doc.at("checksum").at("algorithm").get<std::string>() != "fnv1a64") {
      throw Error(Errc::kParseError, path.string() + ": unsupported checksum algorithm");
    }
    return DatasetManifest{doc.at("path").get<std::string>(),
                           doc.at("samples").get<Index>(),
                           doc.at("features").get<Index>(),
                           doc.at("classes").get<std::vector<std::string>>(),
                           doc.at("class_counts").get<std::vector<Index>>(),
                           doc.at("checksum").at("value").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError, path.string() + ": " + e.what());
  }
}

Dataset load_verified(const std::filesystem::path& manifest_path) {
  const DatasetManifest manifest = read_manifest(manifest_path);
  std::filesystem::path csv = manifest.path;
  if (csv.is_relative()) csv = manifest_path.parent_path() / csv;
  const std::string checksum = file_checksum(csv);
  if (checksum != manifest.checksum) {
    throw Error(Errc::kParseError, csv.string() + ": checksum " + checksum + " does not match manifest " +
                                       manifest.checksum);
  }
  Dataset dataset = load_csv(csv);
  if (dataset.size() != manifest.samples || dataset.dimension() != manifest.features ||
      dataset.classes() != manifest.classes || dataset.class_counts() != manifest.class_counts) {
    throw Error(Errc::kParseError, csv.string() + ": shape or class map differs from manifest");
  }
  return dataset;
}

}  // namespace sacrc
