#include "sacrc/analysis.hpp"
#include "sacrc/classify.hpp"
#include "sacrc/error.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace sacrc;
using namespace sacrc::testing;

TEST_CASE("energy profile sums to one and the threshold is strict") {
  Vector alpha(3);
  alpha << 3.0, 0.0, -4.0;
  const EnergyProfile p = energy_profile(alpha);
  CHECK(p.energies(0) == doctest::Approx(0.36));
  CHECK(p.energies(1) == 0.0);
  CHECK(p.energies(2) == doctest::Approx(0.64));
  CHECK(effective_sparsity(alpha, 0.0) == 2);
  CHECK(effective_sparsity(alpha, 0.5) == 1);
  CHECK(effective_sparsity(alpha, 0.64) == 0);
  CHECK(effective_sparsity(alpha * 1e-150, 0.5) == 1);
  CHECK_THROWS_AS(energy_profile(Vector::Zero(3)), Error);
  CHECK_THROWS_AS(effective_sparsity(alpha, -1e-9), Error);

  Vector half(2);
  half << 1.0, 1.0;
  CHECK(effective_sparsity(half, 0.5) == 0);
}

TEST_CASE("sparsity curves are non-increasing in delta") {
  CounterRng rng(61, 0);
  const std::vector<double> grid = log_grid(1e-6, 1e-1, 26);
  for (int t = 0; t < 30; ++t) {
    const Vector alpha = gaussian(40, rng);
    const SparsityCurve curve = sparsity_curve(alpha, grid);
    REQUIRE(curve.counts.size() == grid.size());
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(curve.counts[i] <= curve.counts[i - 1]);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(curve.counts[i] == effective_sparsity(alpha, grid[i]));
  }
  CHECK_THROWS_AS(sparsity_curve(Vector::Ones(3), {0.1, 0.1}), Error);
}

TEST_CASE("log grid endpoints are exact") {
  const std::vector<double> g = log_grid(1e-6, 1e-1, 6);
  CHECK(g.front() == 1e-6);
  CHECK(g.back() == 1e-1);
  CHECK(g[2] == doctest::Approx(1e-4));
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 4), Error);
  CHECK_THROWS_AS(log_grid(1.0, 2.0, 1), Error);
}

TEST_CASE("decision margin counts weak nonzero coefficients") {
  const ClassPartition p({"a", "b", "c"}, {2, 2, 2});
  Vector alpha(6);
  alpha << 0.9, 0.0, 0.3, 0.1, 0.2, 0.05;
  alpha /= alpha.norm();
  Vector q(3);
  q << alpha(0) + alpha(1), alpha(2) + alpha(3), alpha(4) + alpha(5);

  const double delta = 0.02;
  const MarginReport r = decision_margin_check(q, alpha, p, delta);
  CHECK(r.class_a == 0);
  CHECK(r.class_b == 1);
  CHECK(r.sigma_a == q(0));
  CHECK(r.sigma_b == q(1));
  // energies: 0.9^2/0.9725 = 0.833, 0.3^2 = 0.0925, 0.1^2 = 0.0103 -> one weak atom in b
  CHECK(r.n_a == 0);
  CHECK(r.n_b == 1);
  CHECK(r.bound == doctest::Approx(2.0 * std::sqrt(delta)));
  CHECK(r.holds == (q(0) - q(1) > 2.0 * std::sqrt(delta)));
  CHECK(r.holds);

  CHECK_THROWS_AS(decision_margin_check(q, alpha, p, 0.0), Error);
  CHECK_THROWS_AS(decision_margin_check(q.head(1), alpha.head(2), ClassPartition({"a"}, {2}), 0.1), Error);
}

TEST_CASE("residual decomposition adds up and is orthogonal for least squares") {
  CounterRng rng(62, 0);
  const Dictionary d = random_dictionary(20, {3, 4, 2}, rng);
  const RidgeProjection exact = build_projection(d, 0.0);
  for (int t = 0; t < 10; ++t) {
    const Vector y = gaussian(20, rng);
    const Vector alpha = rls_code(exact, y).coefficients();
    for (Index c = 0; c < 3; ++c) {
      const ResidualDecomposition parts = residual_decomposition(d, alpha, y, c);
      CHECK((parts.epsilon_i - (parts.epsilon + parts.xi_bar)).norm() < 1e-12);
      CHECK((parts.xi + parts.xi_bar - d.atoms() * alpha).norm() < 1e-12);
      CHECK(parts.pythagorean_gap() < 1e-10);
    }
  }
  // With regularization epsilon leaves the span and the identity picks up a cross term.
  const Vector y = gaussian(20, rng);
  const Vector ridge = rls_code(build_projection(d, 1.0), y).coefficients();
  CHECK(residual_decomposition(d, ridge, y, 0).pythagorean_gap() > 1e-6);
  CHECK_THROWS_AS(residual_decomposition(d, ridge, y, 3), Error);
}

TEST_CASE("tie scenario: equal residuals, sparse coding picks the one-atom class") {
  for (const Index m : {Index{3}, Index{4}, Index{30}}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const TieScenario s = build_tie_scenario(m, seed);
      REQUIRE(s.dense_residuals.size() == 2);
      CHECK(std::abs(s.dense_residuals(0) - s.dense_residuals(1)) < 1e-9);
      CHECK(s.atoms_per_class == std::vector<Index>{2, 1});
      CHECK(s.omp_support_per_class == std::vector<Index>{0, 1});

      const FittedModel model = make_model(s.dictionary, s.lambda, s.k);
      const ClassificationOutcome out = classify_sa_crc(model, s.y);
      CHECK(s.dictionary.partition().labels()[static_cast<std::size_t>(out.label)] == "one_atom");
    }
  }
  CHECK_THROWS_AS(build_tie_scenario(2, 0), Error);
}

TEST_CASE("perturbing the tie lets the residuals separate") {
  const TieScenario s = build_tie_scenario(5, 3, 0.1);
  CHECK(s.dense_residuals(1) < s.dense_residuals(0) - 1e-3);
}
