#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sacrc {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Column norms of every atom must lie within this distance of one.
inline constexpr double kUnitNormTolerance = 1e-10;

/// Contiguous class ranges over the columns of a dictionary. Class i owns
/// columns [offset(i), offset(i) + size(i)); the ranges tile 0..total().
class ClassPartition {
 public:
  /// Ranges are laid out back to back in the given order.
  ClassPartition(std::vector<std::string> labels, std::vector<Index> sizes);

  /// Explicit ranges; rejected unless offsets are strictly increasing,
  /// sizes positive and the ranges exactly cover 0..N.
  static ClassPartition from_ranges(std::vector<std::string> labels,
                                    std::vector<Index> offsets,
                                    std::vector<Index> sizes);

  Index class_count() const noexcept { return static_cast<Index>(sizes_.size()); }
  Index total() const noexcept { return total_; }
  Index offset(Index cls) const { return offsets_.at(static_cast<std::size_t>(cls)); }
  Index size(Index cls) const { return sizes_.at(static_cast<std::size_t>(cls)); }
  const std::string& label(Index cls) const { return labels_.at(static_cast<std::size_t>(cls)); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<Index>& sizes() const noexcept { return sizes_; }

  std::optional<Index> index_of(const std::string& label) const;
  Index class_of_column(Index column) const;

  bool operator==(const ClassPartition&) const = default;

 private:
  ClassPartition() = default;
  void validate() const;

  std::vector<std::string> labels_;
  std::vector<Index> offsets_;
  std::vector<Index> sizes_;
  Index total_ = 0;
};

enum class Normalize { kNo, kYes };

/// Training samples as unit-norm columns, grouped contiguously by class.
class Dictionary {
 public:
  /// Columns must already be in class-contiguous order matching `partition`.
  /// With Normalize::kNo any column whose norm is off by more than
  /// kUnitNormTolerance is rejected (NotNormalized); kYes rescales instead
  /// and still rejects zero columns.
  Dictionary(Matrix atoms, ClassPartition partition, Normalize normalize = Normalize::kNo);

  /// Builds from samples in arbitrary order. Classes are indexed in order of
  /// first appearance and columns are stably regrouped per class;
  /// permutation()[j] is the input column that became atom j.
  static Dictionary from_labeled_columns(const Matrix& samples,
                                         std::span<const std::string> labels,
                                         Normalize normalize = Normalize::kNo);

  const Matrix& atoms() const noexcept { return atoms_; }
  Index rows() const noexcept { return atoms_.rows(); }
  Index cols() const noexcept { return atoms_.cols(); }
  const ClassPartition& partition() const noexcept { return partition_; }
  const std::vector<Index>& permutation() const noexcept { return permutation_; }

  auto class_block(Index cls) const {
    return atoms_.middleCols(partition_.offset(cls), partition_.size(cls));
  }

 private:
  Matrix atoms_;
  ClassPartition partition_;
  std::vector<Index> permutation_;
};

/// Binary C x N class indicator: row i is one exactly on class i's columns.
class LabelMatrix {
 public:
  explicit LabelMatrix(const ClassPartition& partition);

  Index rows() const noexcept { return matrix_.rows(); }
  Index cols() const noexcept { return matrix_.cols(); }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& sparse() const noexcept { return matrix_; }
  Matrix dense() const { return Matrix(matrix_); }

  /// q = L * alpha. Each q_i is accumulated left to right over row i's
  /// nonzeros starting from 0.0, so the result is reproducible bit for bit.
  Vector multiply(const Vector& alpha) const;

 private:
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix_;
};

LabelMatrix build_label_matrix(const ClassPartition& partition);

enum class RepresentationKind { kDense, kSparse, kAugmented };

const char* to_string(RepresentationKind kind) noexcept;

/// Coefficient vector over the atoms of a dictionary.
class Representation {
 public:
  static Representation dense(Vector coefficients);
  /// Every nonzero must lie in `support`, the support may not repeat an
  /// index, and |support| <= max_nonzeros.
  static Representation sparse(Vector coefficients, std::vector<Index> support, Index max_nonzeros);
  /// Must have unit l2 norm within kUnitNormTolerance.
  static Representation augmented(Vector coefficients);

  const Vector& coefficients() const noexcept { return coefficients_; }
  Index size() const noexcept { return coefficients_.size(); }
  RepresentationKind kind() const noexcept { return kind_; }
  const std::optional<std::vector<Index>>& support() const noexcept { return support_; }

 private:
  Representation(Vector coefficients, RepresentationKind kind,
                 std::optional<std::vector<Index>> support)
      : coefficients_(std::move(coefficients)), kind_(kind), support_(std::move(support)) {}

  Vector coefficients_;
  RepresentationKind kind_;
  std::optional<std::vector<Index>> support_;
};

/// Everything a classifier needs at test time. The projection P solves
/// (Phi^T Phi + lambda I) P = Phi^T; construction verifies that identity to a
/// relative tolerance of 1e-8. The Gram matrix is kept for batch OMP.
class FittedModel {
 public:
  FittedModel(Dictionary dictionary, Matrix projection, Matrix gram, double lambda, Index k);

  const Dictionary& dictionary() const noexcept { return dictionary_; }
  const Matrix& projection() const noexcept { return projection_; }
  const Matrix& gram() const noexcept { return gram_; }
  const LabelMatrix& label_matrix() const noexcept { return label_matrix_; }
  double lambda() const noexcept { return lambda_; }
  Index k() const noexcept { return k_; }

 private:
  Dictionary dictionary_;
  Matrix projection_;
  Matrix gram_;
  LabelMatrix label_matrix_;
  double lambda_;
  Index k_;
};

/// max |(G + lambda I) P - Phi^T| / max(1, max |Phi^T|).
double normal_equation_residual(const Matrix& atoms, const Matrix& gram,
                                const Matrix& projection, double lambda);

}  // namespace sacrc
