#pragma once

#include "sacrc/model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace sacrc {

/// Samples as columns plus one class identifier per column.
struct Dataset {
  Matrix features;  ///< m x n
  std::vector<std::string> labels;

  Index dimension() const noexcept { return features.rows(); }
  Index size() const noexcept { return features.cols(); }
  /// Distinct labels in order of first appearance.
  std::vector<std::string> classes() const;
  /// Number of samples per class, in classes() order.
  std::vector<Index> class_counts() const;
  /// Throws unless the label count matches the column count.
  void validate() const;
};

/// Reads `label,f0,f1,...` with one sample per row. Errors name the
/// offending 1-based line and column.
Dataset load_csv(const std::filesystem::path& path);
/// Writes the same layout with shortest round-trip formatting, so
/// load_csv(save_csv(d)) reproduces every double exactly.
void save_csv(const Dataset& dataset, const std::filesystem::path& path);

/// Scales every column to unit l2 norm; ZeroSample for a zero column.
Dataset normalize_columns(const Dataset& dataset);

/// d x m matrix of i.i.d. standard normals from CounterRng(seed, stream).
Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed, std::uint64_t stream);

/// Replaces features x by R x with R = gaussian_matrix(d, m, seed, 0).
/// Rows of R are not normalized.
Dataset random_projection(const Dataset& dataset, Index d, std::uint64_t seed);
/// Same with an explicit projection matrix.
Dataset random_projection(const Dataset& dataset, const Matrix& projection);

struct SplitSpec {
  /// Training samples per class: a count, or a fraction of each class.
  std::variant<Index, double> per_class_train = Index{1};
  std::uint64_t seed = 0;
  int trials = 1;
};

struct Split {
  Dataset train;
  Dataset test;
  /// Column indices into the source dataset.
  std::vector<Index> train_indices;
  std::vector<Index> test_indices;
};

/// Stratified split for one trial, drawn from CounterRng(spec.seed, trial).
/// Each class is shuffled (Fisher-Yates) and its first n_train members go to
/// training; both halves keep source order. Requires 1 <= n_train < class size.
Split split(const Dataset& dataset, const SplitSpec& spec, int trial = 0);

enum class SubspaceCoordinates {
  /// |z_i| with z_i standard normal: samples lie in the cone of the basis
  /// and samples of one class are positively correlated.
  kHalfNormal,
  /// z_i standard normal: samples spread symmetrically over the subspace.
  kNormal,
};

struct SubspaceSpec {
  Index classes = 10;
  Index per_class = 20;
  Index dimension = 50;
  Index subspace_dim = 5;
  double noise_sigma = 0.05;
  /// Fraction of basis directions class i shares with class i-1.
  double overlap = 0.0;
  SubspaceCoordinates coordinates = SubspaceCoordinates::kHalfNormal;
  std::uint64_t seed = 0;
};

/// Class i draws samples B_i z + sigma n (n standard normal, z per `coordinates`) and
/// normalizes them. B_i is an orthonormal basis of a random subspace; its
/// first round(overlap * subspace_dim) generating directions are the last
/// ones of class i-1. Samples are ordered class by class, labels "c0", "c1", ...
Dataset synthetic_subspaces(const SubspaceSpec& spec);
/// Orthonormal basis B_i used by synthetic_subspaces for class `cls`.
Matrix synthetic_basis(const SubspaceSpec& spec, Index cls);

/// FNV-1a 64-bit hash of a file's bytes, as 16 lowercase hex digits.
std::string file_checksum(const std::filesystem::path& path);

struct DatasetManifest {
  std::string path;
  Index samples = 0;
  Index features = 0;
  std::vector<std::string> classes;
  std::vector<Index> class_counts;
  std::string checksum;
};

DatasetManifest make_manifest(const Dataset& dataset, const std::filesystem::path& csv_path);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);
/// Loads the CSV a manifest points to (relative paths resolve against the
/// manifest's directory) and checks checksum, shape and class map.
Dataset load_verified(const std::filesystem::path& manifest_path);

}  // namespace sacrc
