#include <cmath>

#include "doctest.h"
#include "subdfo/errors.hpp"
#include "subdfo/simplex_calculus.hpp"
#include "subdfo/test_functions.hpp"
#include "support.hpp"

using namespace subdfo;
using namespace testing;

namespace {

FunctionOracle sphere(Index n) { return make_named_function("sphere", n).oracle; }

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("simplex_calculus") {

TEST_CASE("simplex gradient of ||x||^2 with coordinate directions") {
  const Vector g = gsg(Vector::Zero(2), Matrix::Identity(2, 2), sphere(2));
  CHECK(g(0) == doctest::Approx(1.0));
  CHECK(g(1) == doctest::Approx(1.0));
}

TEST_CASE("simplex Hessian of ||x||^2 by hand") {
  // gsg at e1 and e2 over I: (3, 1) and (1, 3); at 0: (1, 1). The
  // differences stack to 2I.
  const DirectionBundle b = DirectionBundle::shared(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  const Matrix h = gsh(Vector::Zero(2), b, sphere(2));
  CHECK((h - 2.0 * Matrix::Identity(2, 2)).norm() <= 1e-13);
}

TEST_CASE("simplex gradient of a linear function is its projection onto col(S)") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = uniform(rng, 1, 10);
    const Index p = uniform(rng, 1, n + 3);
    const Vector b = gaussian_vec(rng, n);
    FunctionOracle f(n, [b](const Vector& x) { return 2.0 + b.dot(x); });
    const Matrix s = gaussian(rng, n, p);
    const Vector g = gsg(gaussian_vec(rng, n), s, f);
    CHECK((g - projector(s) * b).norm() <= 1e-10 * (1.0 + b.norm()));
  }
}

TEST_CASE("simplex Hessian equals the true Hessian for square nonsingular S = T") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = uniform(rng, 1, 8);
    const Matrix a = gaussian_sym(rng, n);
    const Vector b = gaussian_vec(rng, n);
    FunctionOracle f(n, [a, b](const Vector& x) { return b.dot(x) + 0.5 * x.dot(a * x); });
    const Matrix s = gaussian(rng, n, n) + 2.0 * Matrix::Identity(n, n);
    const Matrix h = gsh(gaussian_vec(rng, n), DirectionBundle::shared(s, s), f);
    CHECK(rel(h, a) <= 1e-8);
  }
}

TEST_CASE("simplex Hessian with per-direction T blocks") {
  // Quadratic f: row i of delta^2 is s_i^T A projected by each T_i, so with
  // every T_i square and nonsingular the result is A again.
  std::mt19937_64 rng(43);
  const Index n = 4;
  const Matrix a = gaussian_sym(rng, n);
  FunctionOracle f(n, [a](const Vector& x) { return 0.5 * x.dot(a * x); });
  std::vector<Matrix> t_list;
  for (Index i = 0; i < n; ++i) t_list.push_back(gaussian(rng, n, n));
  const Matrix s = gaussian(rng, n, n);
  const Matrix h = gsh(Vector::Zero(n), DirectionBundle::per_direction(s, t_list), f);
  CHECK(rel(h, a) <= 1e-8);
}

TEST_CASE("QGSD variants on ||x||^2") {
  const DirectionBundle b = DirectionBundle::shared(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  const ModelResult simple = fit_qgsd(Vector::Zero(2), b, sphere(2), QgsdVariant::Simple, false);
  CHECK((simple.model.gradient - Vector::Ones(2)).norm() <= 1e-13);
  const ModelResult refined = fit_qgsd(Vector::Zero(2), b, sphere(2), QgsdVariant::Refined, false);
  CHECK(refined.model.gradient.norm() <= 1e-13);
  CHECK((refined.model.hessian.matrix() - 2.0 * Matrix::Identity(2, 2)).norm() <= 1e-13);
  REQUIRE(refined.raw_hessian);
  CHECK(refined.kind == ModelKind::QGSD);
}

TEST_CASE("refined QGSD interpolates its own sample set") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = uniform(rng, 2, 8);
    const Index p = uniform(rng, 1, n);
    const Matrix s = gaussian(rng, n, p);
    const TestFunction f = random_test_function(FunctionClass(trial % 3), n, rng);
    const ModelResult r = fit_qgsd(gaussian_vec(rng, n), DirectionBundle::shared(s, s), f.oracle,
                                   QgsdVariant::Refined, true);
    REQUIRE(r.consumed);
    const double scale = std::max(1.0, r.consumed->values().cwiseAbs().maxCoeff());
    CHECK(interpolation_residual(r.model, *r.consumed) <= 1e-9 * scale);
    CHECK_FALSE(r.raw_hessian);
  }
}

TEST_CASE("QGSD evaluates exactly the stencil point union") {
  std::mt19937_64 rng(45);
  for (bool shared : {true, false}) {
    const Index n = 5;
    const Matrix s = gaussian(rng, n, 3);
    const DirectionBundle b =
        shared ? DirectionBundle::shared(s, gaussian(rng, n, 2))
               : DirectionBundle::per_direction(s, {gaussian(rng, n, 1), gaussian(rng, n, 2),
                                                    gaussian(rng, n, 3)});
    FunctionOracle f = sphere(n);
    const std::size_t before = f.evaluations();
    const ModelResult r = fit_qgsd(Vector::Zero(n), b, f, QgsdVariant::Simple, false);
    const std::size_t expected = qgsd_displacements(b).size();
    CHECK(static_cast<std::size_t>(r.consumed->size()) + 1 == expected);
    CHECK(f.evaluations() - before == expected);
  }
}

TEST_CASE("refined QGSD needs a shared T equal to S") {
  const Matrix s = Matrix::Identity(2, 2);
  CHECK(kind_of([&] {
          fit_qgsd(Vector::Zero(2), DirectionBundle::shared(s, 2.0 * s), sphere(2), QgsdVariant::Refined, false);
        }) == ErrorKind::VariantPreconditionViolated);
  CHECK(kind_of([&] {
          fit_qgsd(Vector::Zero(2), DirectionBundle::per_direction(s, {s, s}), sphere(2),
                   QgsdVariant::Refined, false);
        }) == ErrorKind::VariantPreconditionViolated);
}

TEST_CASE("direction bundles are validated") {
  Matrix zero_col = Matrix::Identity(2, 2);
  zero_col.col(1).setZero();
  CHECK(kind_of([&] { DirectionBundle::shared(zero_col, Matrix::Identity(2, 2)); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { DirectionBundle::per_direction(Matrix::Identity(2, 2), {Matrix::Identity(2, 2)}); }) ==
        ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { DirectionBundle::shared(Matrix::Identity(2, 2), Matrix::Identity(3, 3)); }) ==
        ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { gsg(Vector::Zero(3), Matrix::Identity(2, 2), sphere(3)); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("non-finite function values are reported") {
  FunctionOracle bad(2, [](const Vector& x) { return x(0) > 0.5 ? std::nan("") : 0.0; });
  CHECK(kind_of([&] { gsg(Vector::Zero(2), Matrix::Identity(2, 2), bad); }) == ErrorKind::NonFinite);
}

TEST_CASE("stencil evaluations are cached by displacement") {
  FunctionOracle f = sphere(2);
  StencilEvaluations evals(Vector::Zero(2), f);
  const Vector e1 = Vector::Unit(2, 0);
  evals.at(e1);
  evals.at(e1);
  evals.base_value();
  CHECK(evals.size() == 2);
  CHECK(f.evaluations() == 2);
  CHECK(evals.consumed().size() == 1);
}

TEST_CASE("symmetrize returns the symmetric part") {
  Matrix h(2, 2);
  h << 1, 2, 4, 3;
  CHECK(symmetrize(h)(0, 1) == 3.0);
  CHECK(qgsd_variant_from_string("Refined") == QgsdVariant::Refined);
  CHECK_THROWS_AS(qgsd_variant_from_string("centered"), Error);
}

}  // TEST_SUITE
