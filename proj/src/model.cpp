#include "sacrc/model.hpp"

#include "sacrc/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace sacrc {

namespace {

std::string describe_column(Index column) { return "column " + std::to_string(column); }

void normalize_or_check(Matrix& atoms, Normalize normalize) {
  for (Index j = 0; j < atoms.cols(); ++j) {
    const double norm = atoms.col(j).norm();
    if (normalize == Normalize::kYes) {
      if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw Error(Errc::kZeroSample, describe_column(j) + " has zero or non-finite norm");
      }
      atoms.col(j) /= norm;
    } else if (!(std::abs(norm - 1.0) <= kUnitNormTolerance)) {
      throw Error(Errc::kNotNormalized,
                  describe_column(j) + " has norm " + std::to_string(norm));
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ClassPartition

ClassPartition::ClassPartition(std::vector<std::string> labels, std::vector<Index> sizes)
    : labels_(std::move(labels)), sizes_(std::move(sizes)) {
  if (labels_.size() != sizes_.size()) {
    throw Error(Errc::kInvalidPartition, "label count differs from class count");
  }
  offsets_.reserve(sizes_.size());
  for (const Index n : sizes_) {
    offsets_.push_back(total_);
    total_ += n;
  }
  validate();
}

ClassPartition ClassPartition::from_ranges(std::vector<std::string> labels,
                                           std::vector<Index> offsets,
                                           std::vector<Index> sizes) {
  if (labels.size() != sizes.size() || offsets.size() != sizes.size()) {
    throw Error(Errc::kInvalidPartition, "labels, offsets and sizes must have equal length");
  }
  ClassPartition p;
  p.labels_ = std::move(labels);
  p.offsets_ = std::move(offsets);
  p.sizes_ = std::move(sizes);
  for (const Index n : p.sizes_) p.total_ += n;
  p.validate();
  return p;
}

void ClassPartition::validate() const {
  if (sizes_.empty()) throw Error(Errc::kInvalidPartition, "no classes");
  Index expected = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] <= 0) {
      throw Error(Errc::kInvalidPartition, "class " + std::to_string(i) + " is empty");
    }
    if (offsets_[i] != expected) {
      throw Error(Errc::kInvalidPartition,
                  "class " + std::to_string(i) + " does not start where the previous ends");
    }
    expected += sizes_[i];
  }
  std::vector<std::string> sorted = labels_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(Errc::kInvalidPartition, "duplicate class label");
  }
}

std::optional<Index> ClassPartition::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<Index>(it - labels_.begin());
}

Index ClassPartition::class_of_column(Index column) const {
  if (column < 0 || column >= total_) {
    throw Error(Errc::kDimensionMismatch, describe_column(column) + " outside partition");
  }
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), column);
  return static_cast<Index>(it - offsets_.begin()) - 1;
}

// ---------------------------------------------------------------------------
// Dictionary

Dictionary::Dictionary(Matrix atoms, ClassPartition partition, Normalize normalize)
    : atoms_(std::move(atoms)), partition_(std::move(partition)) {
  if (atoms_.rows() < 1 || atoms_.cols() < 1) {
    throw Error(Errc::kDimensionMismatch, "dictionary needs at least one row and one column");
  }
  if (atoms_.cols() != partition_.total()) {
    throw Error(Errc::kDimensionMismatch,
                "partition covers " + std::to_string(partition_.total()) + " columns, matrix has " +
                    std::to_string(atoms_.cols()));
  }
  normalize_or_check(atoms_, normalize);
  permutation_.resize(static_cast<std::size_t>(atoms_.cols()));
  for (Index j = 0; j < atoms_.cols(); ++j) permutation_[static_cast<std::size_t>(j)] = j;
}

Dictionary Dictionary::from_labeled_columns(const Matrix& samples,
                                            std::span<const std::string> labels,
                                            Normalize normalize) {
  if (static_cast<Index>(labels.size()) != samples.cols()) {
    throw Error(Errc::kDimensionMismatch, "one label per column required");
  }
  std::vector<std::string> classes;
  std::unordered_map<std::string, std::size_t> class_index;
  std::vector<std::vector<Index>> members;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    auto [it, inserted] = class_index.try_emplace(labels[j], classes.size());
    if (inserted) {
      classes.push_back(labels[j]);
      members.emplace_back();
    }
    members[it->second].push_back(static_cast<Index>(j));
  }

  std::vector<Index> sizes;
  std::vector<Index> permutation;
  permutation.reserve(labels.size());
  for (const auto& cols : members) {
    sizes.push_back(static_cast<Index>(cols.size()));
    permutation.insert(permutation.end(), cols.begin(), cols.end());
  }

  Matrix reordered(samples.rows(), samples.cols());
  for (std::size_t j = 0; j < permutation.size(); ++j) {
    reordered.col(static_cast<Index>(j)) = samples.col(permutation[j]);
  }
  Dictionary dict(std::move(reordered), ClassPartition(std::move(classes), std::move(sizes)),
                  normalize);
  dict.permutation_ = std::move(permutation);
  return dict;
}

// ---------------------------------------------------------------------------
// LabelMatrix

LabelMatrix::LabelMatrix(const ClassPartition& partition)
    : matrix_(partition.class_count(), partition.total()) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(partition.total()));
  for (Index c = 0; c < partition.class_count(); ++c) {
    for (Index j = 0; j < partition.size(c); ++j) {
      entries.emplace_back(c, partition.offset(c) + j, 1.0);
    }
  }
  matrix_.setFromTriplets(entries.begin(), entries.end());
  matrix_.makeCompressed();
}

Vector LabelMatrix::multiply(const Vector& alpha) const {
  if (alpha.size() != matrix_.cols()) {
    throw Error(Errc::kDimensionMismatch, "label matrix has " + std::to_string(matrix_.cols()) +
                                              " columns, representation has " +
                                              std::to_string(alpha.size()));
  }
  Vector q(matrix_.rows());
  for (Index row = 0; row < matrix_.outerSize(); ++row) {
    double sum = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(matrix_, row); it; ++it) {
      sum += it.value() * alpha(it.col());
    }
    q(row) = sum;
  }
  return q;
}

LabelMatrix build_label_matrix(const ClassPartition& partition) { return LabelMatrix(partition); }

// ---------------------------------------------------------------------------
// Representation

const char* to_string(RepresentationKind kind) noexcept {
  switch (kind) {
    case RepresentationKind::kDense: return "dense";
    case RepresentationKind::kSparse: return "sparse";
    case RepresentationKind::kAugmented: return "augmented";
  }
  return "unknown";
}

Representation Representation::dense(Vector coefficients) {
  return Representation(std::move(coefficients), RepresentationKind::kDense, std::nullopt);
}

Representation Representation::sparse(Vector coefficients, std::vector<Index> support,
                                      Index max_nonzeros) {
  if (static_cast<Index>(support.size()) > max_nonzeros) {
    throw Error(Errc::kInvalidSparsity, "support larger than the sparsity threshold");
  }
  std::vector<char> in_support(static_cast<std::size_t>(coefficients.size()), 0);
  for (const Index j : support) {
    if (j < 0 || j >= coefficients.size()) {
      throw Error(Errc::kDimensionMismatch, "support index out of range");
    }
    if (in_support[static_cast<std::size_t>(j)]) {
      throw Error(Errc::kInvalidArgument, "support repeats index " + std::to_string(j));
    }
    in_support[static_cast<std::size_t>(j)] = 1;
  }
  for (Index j = 0; j < coefficients.size(); ++j) {
    if (coefficients(j) != 0.0 && !in_support[static_cast<std::size_t>(j)]) {
      throw Error(Errc::kInvalidArgument, "nonzero coefficient outside the support");
    }
  }
  return Representation(std::move(coefficients), RepresentationKind::kSparse, std::move(support));
}

Representation Representation::augmented(Vector coefficients) {
  const double norm = coefficients.norm();
  if (!(std::abs(norm - 1.0) <= kUnitNormTolerance)) {
    throw Error(Errc::kNotNormalized, "augmented representation has norm " + std::to_string(norm));
  }
  return Representation(std::move(coefficients), RepresentationKind::kAugmented, std::nullopt);
}

// ---------------------------------------------------------------------------
// FittedModel

double normal_equation_residual(const Matrix& atoms, const Matrix& gram, const Matrix& projection,
                                double lambda) {
  Matrix lhs = gram * projection;
  lhs += lambda * projection;
  lhs -= atoms.transpose();
  const double scale = std::max(1.0, atoms.cwiseAbs().maxCoeff());
  return lhs.cwiseAbs().maxCoeff() / scale;
}

FittedModel::FittedModel(Dictionary dictionary, Matrix projection, Matrix gram, double lambda,
                         Index k)
    : dictionary_(std::move(dictionary)),
      projection_(std::move(projection)),
      gram_(std::move(gram)),
      label_matrix_(dictionary_.partition()),
      lambda_(lambda),
      k_(k) {
  const Index n = dictionary_.cols();
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
    throw Error(Errc::kInvalidArgument, "lambda must be finite and nonnegative");
  }
  if (k_ < 1 || k_ > n) {
    throw Error(Errc::kInvalidSparsity,
                "k = " + std::to_string(k_) + " outside [1, " + std::to_string(n) + "]");
  }
  if (projection_.rows() != n || projection_.cols() != dictionary_.rows()) {
    throw Error(Errc::kDimensionMismatch, "projection must be N x m");
  }
  if (gram_.rows() != n || gram_.cols() != n) {
    throw Error(Errc::kDimensionMismatch, "Gram matrix must be N x N");
  }
  const double residual = normal_equation_residual(dictionary_.atoms(), gram_, projection_, lambda_);
  if (!(residual <= 1e-8)) {
    throw Error(Errc::kSingularGram,
                "projection violates the normal equations (residual " + std::to_string(residual) + ")");
  }
}

}  // namespace sacrc
