#include "sacrc/solvers.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace sacrc;
using namespace sacrc::testing;

namespace {

// Split a = u - v with u, v >= 0 and run projected gradient on the smooth
// bound-constrained problem min ||y - Phi(u - v)||^2 + lambda1 * sum(u + v).
// Step from the exact largest eigenvalue; many iterations for a tight oracle.
Vector projected_gradient_oracle(const Matrix& phi, const Vector& y, double lambda1) {
  const Matrix gram = phi.transpose() * phi;
  const double top = Eigen::SelfAdjointEigenSolver<Matrix>(gram).eigenvalues().maxCoeff();
  const double step = 1.0 / (4.0 * top);
  const Index n = phi.cols();
  Vector u = Vector::Zero(n), v = Vector::Zero(n);
  const Vector correlation = phi.transpose() * y;
  for (int it = 0; it < 400000; ++it) {
    const Vector g = 2.0 * (gram * (u - v) - correlation);
    const Vector u_next = (u - step * (g.array() + lambda1).matrix()).cwiseMax(0.0);
    const Vector v_next = (v - step * (-g.array() + lambda1).matrix()).cwiseMax(0.0);
    const double moved = (u_next - u).norm() + (v_next - v).norm();
    u = u_next;
    v = v_next;
    if (moved < 1e-15) break;
  }
  return u - v;
}

}  // namespace

TEST_CASE("power iteration matches the symmetric eigensolver") {
  CounterRng rng(41, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const Dictionary d = random_dictionary(8, {4, 5, 3}, rng);
    const Matrix gram = d.atoms().transpose() * d.atoms();
    const double exact = Eigen::SelfAdjointEigenSolver<Matrix>(gram).eigenvalues().maxCoeff();
    CHECK(largest_gram_eigenvalue(d) == doctest::Approx(exact).epsilon(1e-4));
  }
}

TEST_CASE("lasso objective is within 1e-6 of the projected-gradient oracle") {
  CounterRng rng(42, 0);
  for (int trial = 0; trial < 12; ++trial) {
    const Index m = 4 + static_cast<Index>(rng.below(7));
    const Dictionary d = random_dictionary(m, {3, 4, 3}, rng);
    const Vector y = gaussian(m, rng);
    const double lambda1 = std::pow(10.0, -2.0 + 1.5 * rng.uniform());
    const LassoResult result = lasso_code(d, y, lambda1);
    const Vector oracle = projected_gradient_oracle(d.atoms(), y, lambda1);
    const double reference = lasso_objective(d, y, oracle, lambda1);
    CHECK(result.converged);
    CHECK(std::abs(result.objective - reference) <= 1e-6 * reference);
    CHECK(result.objective == doctest::Approx(lasso_objective(d, y, result.code.coefficients(), lambda1)));
  }
}

TEST_CASE("orthonormal dictionary gives soft thresholding") {
  const Dictionary d(Matrix::Identity(4, 4), ClassPartition({"a", "b"}, {2, 2}));
  Vector y(4);
  y << 2.0, -0.3, 0.05, -1.0;
  const double lambda1 = 0.4;  // minimizer of (y - a)^2 + lambda1 |a|: shrink by lambda1 / 2
  const LassoResult r = lasso_code(d, y, lambda1);
  CHECK(r.code.coefficients()(0) == doctest::Approx(1.8).epsilon(1e-7));
  CHECK(r.code.coefficients()(1) == doctest::Approx(-0.1).epsilon(1e-7));
  CHECK(r.code.coefficients()(2) == 0.0);
  CHECK(r.code.coefficients()(3) == doctest::Approx(-0.8).epsilon(1e-7));
  CHECK(*r.code.support() == std::vector<Index>{0, 1, 3});
}

TEST_CASE("large weight zeroes the code") {
  CounterRng rng(43, 0);
  const Dictionary d = random_dictionary(6, {3, 3}, rng);
  const Vector y = gaussian(6, rng);
  const double lambda1 = 2.0 * (d.atoms().transpose() * y).cwiseAbs().maxCoeff() + 1.0;
  const LassoResult r = lasso_code(d, y, lambda1);
  CHECK(r.code.coefficients().norm() == 0.0);
  CHECK(lasso_optimality(d, y, r.code.coefficients(), lambda1) == 0.0);
}

TEST_CASE("iteration cap is reported, not thrown") {
  CounterRng rng(44, 0);
  const Dictionary d = random_dictionary(10, {6, 6}, rng);
  const Vector y = gaussian(10, rng);
  const LassoResult r = lasso_code(d, y, 1e-3, LassoOptions{1e-14, 3});
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
}

TEST_CASE("reusable solver equals the one-shot function") {
  CounterRng rng(45, 0);
  const Dictionary d = random_dictionary(9, {4, 4}, rng);
  const LassoSolver solver(d);
  const Vector y = gaussian(9, rng);
  const LassoResult a = solver.solve(y, 0.05);
  const LassoResult b = lasso_code(d, y, 0.05);
  CHECK((a.code.coefficients() - b.code.coefficients()).norm() < 1e-12);
  CHECK(solver.lipschitz() == doctest::Approx(2.0 * largest_gram_eigenvalue(d)));
}
