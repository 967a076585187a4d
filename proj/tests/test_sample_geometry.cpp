#include <cmath>

#include "doctest.h"
#include "subdfo/errors.hpp"
#include "subdfo/sample_geometry.hpp"
#include "support.hpp"

using namespace subdfo;
using namespace testing;

namespace {

SampleSet square_corner_set() {
  Matrix d(3, 3);
  d << 1, 0, 1,
       0, 1, 1,
       0, 0, 0;
  Vector values(4);
  values << 0, 1, 1, 2;
  return SampleSet(Vector::Zero(3), d, values);
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

// Rank of the 2-D quadratic Vandermonde matrix [1, x, y, x^2, xy, y^2].
Index vandermonde_rank(const Matrix& points) {
  Matrix v(points.cols(), 6);
  for (Index i = 0; i < points.cols(); ++i) {
    const double x = points(0, i);
    const double y = points(1, i);
    v.row(i) << 1, x, y, x * x, x * y, y * y;
  }
  Eigen::FullPivLU<Matrix> lu(v);
  lu.setThreshold(1e-10);
  return lu.rank();
}

}  // namespace

TEST_SUITE("sample_geometry") {

TEST_CASE("sample set accessors and value differences") {
  const SampleSet y = square_corner_set();
  CHECK(y.dim() == 3);
  CHECK(y.size() == 3);
  CHECK(y.base_value() == 0.0);
  CHECK(y.point(2)(1) == 1.0);
  Vector expected(3);
  expected << 1, 1, 2;
  CHECK(y.value_differences() == expected);
}

TEST_CASE("duplicates merge when values agree and conflict otherwise") {
  Matrix d(2, 3);
  d << 1, 1, 0,
       0, 1e-15, 1;
  Vector same(4);
  same << 0, 1, 1, 2;
  const SampleSet merged(Vector::Zero(2), d, same);
  CHECK(merged.size() == 2);

  Vector different(4);
  different << 0, 1, 1.5, 2;
  CHECK(kind_of([&] { SampleSet(Vector::Zero(2), d, different); }) == ErrorKind::DuplicateConflict);

  const SampleSet kept(Vector::Zero(2), d, different, DuplicatePolicy::Keep);
  CHECK(kept.size() == 3);
  CHECK_FALSE(interpolation_feasible(kept));
  CHECK(interpolation_infeasibility(kept) > 0.1);
}

TEST_CASE("a zero displacement duplicates the base point") {
  Matrix d(2, 2);
  d << 0, 1,
       0, 0;
  Vector values(3);
  values << 3, 3, 4;
  CHECK(SampleSet(Vector::Zero(2), d, values).size() == 1);
  values(1) = 5;
  CHECK(kind_of([&] { SampleSet(Vector::Zero(2), d, values); }) == ErrorKind::DuplicateConflict);
}

TEST_CASE("malformed sample sets are rejected") {
  CHECK(kind_of([] { SampleSet(Vector::Zero(2), Matrix::Zero(3, 1), Vector::Zero(2)); }) ==
        ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { SampleSet(Vector::Zero(2), Matrix::Ones(2, 1), Vector::Zero(3)); }) ==
        ErrorKind::DimensionMismatch);
  Vector values(2);
  values << 0, std::nan("");
  CHECK(kind_of([&] { SampleSet(Vector::Zero(2), Matrix::Ones(2, 1), values); }) ==
        ErrorKind::NonFinite);
}

TEST_CASE("detect_subspace finds the plane of the corner set") {
  const SampleSet y = square_corner_set();
  const SubspaceFrame frame = detect_subspace(y);
  CHECK(frame.dim() == 2);
  CHECK(frame.ambient() == 3);
  Matrix p = Matrix::Zero(3, 3);
  p(0, 0) = p(1, 1) = 1.0;
  CHECK((frame.basis().projector() - p).norm() <= 1e-14);
  CHECK((frame.q() * frame.hatted() - y.displacements()).norm() <= 1e-14);
  const Matrix& perp = frame.basis().complement();
  REQUIRE(perp.cols() == 1);
  CHECK(std::abs(std::abs(perp(2, 0)) - 1.0) <= 1e-14);
}

TEST_CASE("detect_subspace recovers the rank of random low-rank sets") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = uniform(rng, 2, 20);
    const Index d = uniform(rng, 1, n);
    const Index m = uniform(rng, d, d + 5);
    const Matrix q = gram_schmidt(gaussian(rng, n, d));
    const Matrix disp = q * gaussian(rng, d, m);
    const SampleSet y(gaussian_vec(rng, n), disp, gaussian_vec(rng, m + 1));
    const SubspaceFrame frame = detect_subspace(y);
    CHECK(frame.dim() == d);
    CHECK((frame.basis().projector() - q * q.transpose()).norm() <= 1e-10);
  }
}

TEST_CASE("detect_subspace needs a displacement") {
  const SampleSet empty(Vector::Zero(2), Matrix(2, 0), Vector::Zero(1));
  CHECK(kind_of([&] { detect_subspace(empty); }) == ErrorKind::EmptySet);
}

TEST_CASE("embed checks membership in col(Q)") {
  Matrix q(3, 1);
  q << 1, 0, 0;
  Matrix inside(3, 1);
  inside << 2, 0, 0;
  const SubspaceFrame frame = SubspaceFrame::embed(OrthonormalBasis(q), Vector::Zero(3), inside);
  CHECK(frame.hatted()(0, 0) == 2.0);
  CHECK(frame.median_displacement_norm() == 2.0);
  Matrix outside(3, 1);
  outside << 1, 1, 0;
  CHECK(kind_of([&] { SubspaceFrame::embed(OrthonormalBasis(q), Vector::Zero(3), outside); }) ==
        ErrorKind::NotInSubspace);
  Matrix skew(2, 1);
  skew << 1, 1;
  CHECK(kind_of([&] { OrthonormalBasis{skew}; }) == ErrorKind::NotOrthonormal);
}

TEST_CASE("hatted sample set and function agree with the full ones") {
  std::mt19937_64 rng(22);
  const Index n = 6;
  const Index d = 3;
  const Matrix q = gram_schmidt(gaussian(rng, n, d));
  const Vector x0 = gaussian_vec(rng, n);
  const Matrix disp = q * gaussian(rng, d, 4);
  FunctionOracle f(n, [](const Vector& x) { return x.squaredNorm() + std::sin(x(0)); });
  Vector values(5);
  values(0) = f(x0);
  for (Index i = 0; i < 4; ++i) values(i + 1) = f(x0 + disp.col(i));
  const SampleSet y(x0, disp, values);
  const SubspaceFrame frame = SubspaceFrame::embed(OrthonormalBasis(q), x0, disp);
  const SampleSet yhat = hat_sampleset(y, frame);
  CHECK(yhat.dim() == d);
  CHECK(yhat.values() == y.values());
  const FunctionOracle fhat = hat_function(f, frame);
  const std::size_t before = f.evaluations();
  for (Index i = 0; i < 4; ++i) {
    CHECK(std::abs(fhat(yhat.displacements().col(i)) - y.values()(i + 1)) <= 1e-12);
  }
  CHECK(f.evaluations() == before + 4);
  CHECK(kind_of([&] { f(Vector::Zero(2)); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("constraint rows evaluate the quadratic increment") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = uniform(rng, 1, 6);
    const Matrix disp = gaussian(rng, n, 3);
    const Vector alpha = gaussian_vec(rng, n);
    const Matrix h = gaussian_sym(rng, n);
    Vector unknowns(quadratic_unknowns(n));
    unknowns << alpha, svec(SymMatrix::from_matrix(h)).coords;
    const Vector got = quadratic_constraint_matrix(disp) * unknowns;
    for (Index i = 0; i < 3; ++i) {
      double quad = 0.0;
      for (Index a = 0; a < n; ++a) {
        for (Index b = 0; b < n; ++b) quad += disp(a, i) * h(a, b) * disp(b, i);
      }
      const double expected = disp.col(i).dot(alpha) + 0.5 * quad;
      CHECK(std::abs(got(i) - expected) <= 1e-12 * (1.0 + std::abs(expected)));
    }
  }
}

TEST_CASE("poisedness agrees with the Vandermonde rank in the plane") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix disp = gaussian(rng, 2, 5);
    Matrix points(2, 6);
    points << Vector::Zero(2), disp;
    const SampleSet y(Vector::Zero(2), disp, gaussian_vec(rng, 6));
    CHECK(poised_for_quadratic(y) == (vandermonde_rank(points) == 6));
    CHECK(poised_for_quadratic(y));
  }
  // Six points on a conic (the unit circle) are never poised.
  Matrix circle(2, 5);
  for (Index i = 0; i < 5; ++i) {
    const double t = 0.4 + 1.1 * static_cast<double>(i);
    circle(0, i) = std::cos(t) - 1.0;
    circle(1, i) = std::sin(t);
  }
  Matrix points(2, 6);
  points << Vector::Zero(2), circle;
  CHECK(vandermonde_rank(points) == 5);
  const SampleSet on_conic(Vector::Zero(2), circle, Vector::Zero(6));
  CHECK_FALSE(poised_for_quadratic(on_conic, 1e-10));
  // Too few points is not poised either.
  const SampleSet few(Vector::Zero(2), circle.leftCols(3), Vector::Zero(4));
  CHECK_FALSE(poised_for_quadratic(few));
}

TEST_CASE("feasibility holds for data from any function when rows are independent") {
  std::mt19937_64 rng(25);
  const Matrix disp = gaussian(rng, 3, 6);
  const SampleSet y(Vector::Zero(3), disp, gaussian_vec(rng, 7));
  CHECK(interpolation_feasible(y));
  CHECK(interpolation_infeasibility(y) <= 1e-12);
}

}  // TEST_SUITE
