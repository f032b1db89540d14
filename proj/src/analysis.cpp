#include "sacrc/analysis.hpp"

#include "sacrc/classify.hpp"
#include "sacrc/error.hpp"
#include "sacrc/random.hpp"
#include "sacrc/solvers.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numbers>

namespace sacrc {

EnergyProfile energy_profile(const Vector& alpha) {
  const double norm2 = alpha.squaredNorm();
  if (!(norm2 > 0.0)) throw Error(Errc::kZeroVector, "energy profile of a zero representation");
  return EnergyProfile{alpha.array().square() / norm2};
}

Index effective_sparsity(const Vector& alpha, double delta) {
  if (!(delta >= 0.0)) throw Error(Errc::kInvalidArgument, "delta must be nonnegative");
  const EnergyProfile profile = energy_profile(alpha);
  return (profile.energies.array() > delta).count();
}

SparsityCurve sparsity_curve(const Vector& alpha, const std::vector<double>& delta_grid) {
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    if (!(delta_grid[i] >= 0.0) || (i > 0 && !(delta_grid[i] > delta_grid[i - 1]))) {
      throw Error(Errc::kInvalidArgument, "delta grid must be nonnegative and strictly increasing");
    }
  }
  const EnergyProfile profile = energy_profile(alpha);
  SparsityCurve curve{delta_grid, {}};
  curve.counts.reserve(delta_grid.size());
  for (const double delta : delta_grid) {
    curve.counts.push_back((profile.energies.array() > delta).count());
  }
  return curve;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw Error(Errc::kInvalidArgument, "log grid needs 0 < lo < hi and at least two points");
  }
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < count; ++i) {
    grid.push_back(std::pow(10.0, a + (b - a) * i / (count - 1)));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

MarginReport decision_margin_check(const Vector& q, const Vector& alpha_aug,
                                   const ClassPartition& partition, double delta) {
  if (partition.class_count() < 2 || q.size() < 2) {
    throw Error(Errc::kTooFewClasses, "margin needs at least two classes");
  }
  if (q.size() != partition.class_count() || alpha_aug.size() != partition.total()) {
    throw Error(Errc::kDimensionMismatch, "q or alpha does not match the partition");
  }
  if (!(delta > 0.0)) throw Error(Errc::kInvalidArgument, "delta must be positive");

  MarginReport report;
  report.delta = delta;
  report.class_a = argmax_lowest(q);
  report.class_b = report.class_a == 0 ? 1 : 0;
  for (Index c = 0; c < q.size(); ++c) {
    if (c != report.class_a && q(c) > q(report.class_b)) report.class_b = c;
  }
  report.sigma_a = q(report.class_a);
  report.sigma_b = q(report.class_b);

  const EnergyProfile profile = energy_profile(alpha_aug);
  auto weak_count = [&](Index cls) {
    Index count = 0;
    for (Index j = partition.offset(cls); j < partition.offset(cls) + partition.size(cls); ++j) {
      if (alpha_aug(j) != 0.0 && profile.energies(j) < delta) ++count;
    }
    return count;
  };
  report.n_a = weak_count(report.class_a);
  report.n_b = weak_count(report.class_b);
  report.bound = 2.0 * std::sqrt(delta) * static_cast<double>(report.n_b - report.n_a);
  report.holds = report.sigma_a - report.sigma_b > report.bound;
  return report;
}

double ResidualDecomposition::pythagorean_gap() const {
  const double lhs = epsilon_i.squaredNorm();
  const double rhs = epsilon.squaredNorm() + xi_bar.squaredNorm();
  if (lhs == 0.0) return std::abs(rhs);
  return std::abs(lhs - rhs) / lhs;
}

ResidualDecomposition residual_decomposition(const Dictionary& dictionary, const Vector& alpha,
                                             const Vector& y, Index class_index) {
  if (alpha.size() != dictionary.cols() || y.size() != dictionary.rows()) {
    throw Error(Errc::kDimensionMismatch, "alpha or y does not match the dictionary");
  }
  const ClassPartition& partition = dictionary.partition();
  if (class_index < 0 || class_index >= partition.class_count()) {
    throw Error(Errc::kDimensionMismatch, "class index out of range");
  }
  const Vector reconstruction = dictionary.atoms() * alpha;
  ResidualDecomposition parts;
  parts.epsilon = y - reconstruction;
  parts.xi = dictionary.class_block(class_index) *
             alpha.segment(partition.offset(class_index), partition.size(class_index));
  parts.xi_bar = reconstruction - parts.xi;
  parts.epsilon_i = y - parts.xi;
  return parts;
}

TieScenario build_tie_scenario(Index m, std::uint64_t seed, double perturbation) {
  if (m < 3) throw Error(Errc::kInfeasibleGeometry, "tie scenario needs m >= 3");
  CounterRng rng(seed, 0);
  const Index frame_dim = std::min<Index>(m, 4);
  Matrix gaussian(m, frame_dim);
  for (Index j = 0; j < frame_dim; ++j) {
    for (Index i = 0; i < m; ++i) gaussian(i, j) = rng.normal();
  }
  const Matrix frame = gaussian.householderQr().householderQ() * Matrix::Identity(m, frame_dim);

  constexpr double kDegree = std::numbers::pi / 180.0;
  const double theta = (70.0 + 40.0 * rng.uniform()) * kDegree;
  const double phi = (25.0 + 20.0 * rng.uniform()) * kDegree;
  const double length = 0.5 + 0.5 * rng.uniform();

  const Vector u = frame.col(0);
  const Vector w = std::cos(theta) * frame.col(0) + std::sin(theta) * frame.col(1);
  const Vector e = frame.col(2);
  Matrix atoms(m, 3);
  atoms.col(0) = std::cos(phi) * w + std::sin(phi) * e;
  atoms.col(1) = std::cos(phi) * w - std::sin(phi) * e;
  atoms.col(2) = u;
  for (Index j = 0; j < 3; ++j) atoms.col(j).normalize();

  Vector y = (1.0 + perturbation) * length * u + length * w;
  if (m > 3) y += (0.1 + 0.2 * rng.uniform()) * length * frame.col(3);
  y /= y.norm();

  TieScenario scenario{.dictionary = Dictionary(std::move(atoms), ClassPartition({"two_atom", "one_atom"}, {2, 1})),
                       .y = std::move(y),
                       .fewer_atom_class = 1,
                       .k = 1,
                       .lambda = 0.0,
                       .dense_residuals = {},
                       .atoms_per_class = {2, 1},
                       .omp_support_per_class = {},
                       .theta = theta,
                       .phi = phi};

  const RidgeProjection projection = build_projection(scenario.dictionary, scenario.lambda);
  scenario.dense_residuals =
      class_residuals(scenario.dictionary, rls_code(projection, scenario.y), scenario.y);

  const PursuitResult pursuit = omp(scenario.dictionary, scenario.y, scenario.k);
  scenario.omp_support_per_class.assign(2, 0);
  for (const Index j : pursuit.trace.selected_atoms) {
    ++scenario.omp_support_per_class[static_cast<std::size_t>(
        scenario.dictionary.partition().class_of_column(j))];
  }
  return scenario;
}

}  // namespace sacrc
