#pragma once

#include "sacrc/model.hpp"

#include <cstdint>
#include <vector>

namespace sacrc {

/// Xi_n = alpha_n^2 / ||alpha||^2.
struct EnergyProfile {
  Vector energies;
};

EnergyProfile energy_profile(const Vector& alpha);
inline EnergyProfile energy_profile(const Representation& alpha) {
  return energy_profile(alpha.coefficients());
}

/// |A_H(delta)| = #{n : Xi_n > delta}. The inequality is strict, so an
/// energy equal to delta is not counted.
Index effective_sparsity(const Vector& alpha, double delta);
inline Index effective_sparsity(const Representation& alpha, double delta) {
  return effective_sparsity(alpha.coefficients(), delta);
}

struct SparsityCurve {
  std::vector<double> deltas;
  std::vector<Index> counts;
};

/// Effective sparsity at each delta of a strictly increasing, nonnegative grid.
SparsityCurve sparsity_curve(const Vector& alpha, const std::vector<double>& delta_grid);
inline SparsityCurve sparsity_curve(const Representation& alpha, const std::vector<double>& delta_grid) {
  return sparsity_curve(alpha.coefficients(), delta_grid);
}

/// `count` points spaced evenly in log10 between lo and hi inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

/// Pooled-labeling reliability check for a given delta:
/// sigma_a - sigma_b > 2 sqrt(delta) (n_b - n_a).
struct MarginReport {
  Index class_a = 0;  ///< class with the largest pooled sum
  Index class_b = 0;  ///< runner-up
  double sigma_a = 0.0;
  double sigma_b = 0.0;
  /// Nonzero coefficients of class a (resp. b) whose energy is below delta.
  Index n_a = 0;
  Index n_b = 0;
  double delta = 0.0;
  double bound = 0.0;  ///< 2 sqrt(delta) (n_b - n_a)
  bool holds = false;
};

MarginReport decision_margin_check(const Vector& q, const Vector& alpha_aug,
                                   const ClassPartition& partition, double delta);

/// Pieces of the class-specific error for one class i:
///   epsilon   = y - Phi alpha
///   xi        = Phi_i alpha_i
///   xi_bar    = Phi alpha - Phi_i alpha_i
///   epsilon_i = y - Phi_i alpha_i = epsilon + xi_bar
struct ResidualDecomposition {
  Vector epsilon;
  Vector xi;
  Vector xi_bar;
  Vector epsilon_i;

  /// | ||eps_i||^2 - (||eps||^2 + ||xi_bar||^2) | / ||eps_i||^2 (0 when eps_i = 0).
  /// Vanishes when epsilon is orthogonal to the span of Phi.
  double pythagorean_gap() const;
};

ResidualDecomposition residual_decomposition(const Dictionary& dictionary, const Vector& alpha,
                                             const Vector& y, Index class_index);

/// Two classes placed so that their dense-code residuals tie while one of
/// them reaches its residual with fewer atoms.
///
/// Class 0 ("two_atom") holds atoms v1, v2 = cos(phi) w +- sin(phi) e; class 1
/// ("one_atom") holds the single atom u. With xi_a = s u and xi_b = s w the
/// sample is y = xi_a + xi_b + eps, eps orthogonal to all three atoms (zero
/// when m = 3). xi_a and xi_b have equal length and are mirror images about
/// their sum, so the least-squares class residuals coincide. `perturbation`
/// lengthens xi_a by that relative amount to break the tie.
struct TieScenario {
  Dictionary dictionary;
  Vector y;
  Index fewer_atom_class = 1;
  Index k = 1;           ///< pursuit length that recovers the one-atom class
  double lambda = 0.0;   ///< dense code is the unregularized least-squares code
  Vector dense_residuals;
  std::vector<Index> atoms_per_class;
  std::vector<Index> omp_support_per_class;
  double theta = 0.0;    ///< angle between u and w
  double phi = 0.0;      ///< half-angle between v1 and v2
};

/// Throws InfeasibleGeometry for m < 3.
TieScenario build_tie_scenario(Index m, std::uint64_t seed, double perturbation = 0.0);

}  // namespace sacrc
