#include <cmath>
#include <limits>

#include "doctest.h"
#include "subdfo/errors.hpp"
#include "subdfo/linear_kernel.hpp"
#include "support.hpp"

using namespace subdfo;
using namespace testing;

namespace {

double frobenius_inner(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) s += a(i, j) * b(i, j);
  }
  return s;
}

// U diag(sigma) V^T with random orthogonal factors.
Matrix with_singular_values(std::mt19937_64& rng, Index rows, Index cols, const Vector& sigma) {
  const Matrix u = gram_schmidt(gaussian(rng, rows, rows));
  const Matrix v = gram_schmidt(gaussian(rng, cols, cols));
  Matrix s = Matrix::Zero(rows, cols);
  for (Index i = 0; i < sigma.size(); ++i) s(i, i) = sigma(i);
  return u * s * v.transpose();
}

}  // namespace

TEST_SUITE("linear_kernel") {

TEST_CASE("svec ordering and scaling on a 2x2 example") {
  Matrix a(2, 2);
  a << 1, 2, 2, 3;
  const SVecCoords v = svec(SymMatrix::from_matrix(a));
  REQUIRE(v.coords.size() == 3);
  CHECK(v.coords(0) == 1.0);
  CHECK(v.coords(1) == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(v.coords(2) == 3.0);
}

TEST_CASE("svec is an isometry for the Frobenius inner product") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = uniform(rng, 1, 9);
    const Matrix a = gaussian_sym(rng, n);
    const Matrix b = gaussian_sym(rng, n);
    const Vector sa = svec(SymMatrix::from_matrix(a)).coords;
    const Vector sb = svec(SymMatrix::from_matrix(b)).coords;
    CHECK(sa.size() == svec_length(n));
    CHECK(std::abs(sa.dot(sb) - frobenius_inner(a, b)) <= 1e-12 * (1.0 + a.norm() * b.norm()));
    CHECK((smat(svec(SymMatrix::from_matrix(a))).matrix() - a).cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + a.norm()));
  }
}

TEST_CASE("svec_of_outer matches svec of the formed outer product") {
  std::mt19937_64 rng(12);
  for (Index n = 1; n <= 7; ++n) {
    const Vector d = gaussian_vec(rng, n);
    const Vector direct = svec(SymMatrix::from_matrix(d * d.transpose())).coords;
    CHECK((svec_of_outer(d) - direct).norm() <= 1e-14 * (1.0 + direct.norm()));
  }
}

TEST_CASE("smat rejects a vector of the wrong length") {
  SVecCoords bad{3, Vector::Zero(5)};
  CHECK_THROWS_AS(smat(bad), Error);
  try {
    smat(bad);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("SymMatrix validation") {
  CHECK_THROWS_AS(SymMatrix::from_matrix(Matrix::Zero(2, 3)), Error);
  Matrix nonsym(2, 2);
  nonsym << 1, 2, 3, 4;
  CHECK_THROWS_AS(SymMatrix::from_matrix(nonsym), Error);
  const SymMatrix s = SymMatrix::symmetric_part(nonsym);
  CHECK(s(0, 1) == 2.5);
  SymMatrix z(3);
  z.set(0, 2, 4.0);
  CHECK(z(2, 0) == 4.0);
  CHECK(z.frobenius_norm() == doctest::Approx(std::sqrt(32.0)));
}

TEST_CASE("require_finite flags NaN and Inf") {
  Matrix a = Matrix::Zero(2, 2);
  a(1, 0) = std::numeric_limits<double>::quiet_NaN();
  try {
    require_finite(a, "a");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFinite);
  }
  Vector v = Vector::Ones(3);
  v(2) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(require_finite(v, "v"), Error);
}

TEST_CASE("orthonormal_columns spans the same space as Gram-Schmidt") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = uniform(rng, 2, 12);
    const Index r = uniform(rng, 1, n);
    const Index k = uniform(rng, r, n + 2);
    const Matrix a = gaussian(rng, n, r) * gaussian(rng, r, k);
    const OrthonormalFactor f = orthonormal_columns(a, 1e-10);
    CHECK(f.rank == r);
    CHECK(f.q.cols() == r);
    CHECK(orthonormality_defect(f.q) <= 1e-12);
    CHECK((f.q * f.q.transpose() - projector(a)).norm() <= 1e-9);
    for (Index j = 0; j < f.q.cols(); ++j) {
      Index at = 0;
      f.q.col(j).cwiseAbs().maxCoeff(&at);
      CHECK(f.q(at, j) > 0.0);
    }
  }
}

TEST_CASE("orthonormal_complement completes the basis") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = uniform(rng, 1, 15);
    const Index d = uniform(rng, 0, n);
    const Matrix q = gram_schmidt(gaussian(rng, n, d));
    const Matrix perp = orthonormal_complement(q);
    CHECK(perp.cols() == n - d);
    if (perp.cols() == 0) continue;
    CHECK(orthonormality_defect(perp) <= 1e-12);
    if (d > 0) CHECK((q.transpose() * perp).norm() <= 1e-12);
  }
  Matrix not_orthonormal(3, 1);
  not_orthonormal << 1, 1, 0;
  try {
    orthonormal_complement(not_orthonormal);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotOrthonormal);
  }
}

TEST_CASE("minnorm_lstsq matches the normal-equation formulas") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 40; ++trial) {
    const Index m = uniform(rng, 1, 8);
    const Index n = uniform(rng, m, 12);
    // Full row rank: x = A^T (A A^T)^{-1} b.
    const Matrix a = gaussian(rng, m, n);
    const Vector b = gaussian_vec(rng, m);
    const Vector oracle = a.transpose() * (a * a.transpose()).ldlt().solve(b);
    const LeastSquaresSolution ls = minnorm_lstsq(a, b);
    CHECK((ls.x - oracle).norm() <= 1e-10 * (1.0 + oracle.norm()));
    CHECK(ls.rank == m);
    CHECK(ls.nullspace.cols() == n - m);
    if (ls.nullspace.cols() > 0) CHECK((a * ls.nullspace).norm() <= 1e-10);
    CHECK(ls.residual_norm <= 1e-10);
    CHECK((minnorm_solve(a, b) - ls.x).norm() <= 1e-12 * (1.0 + oracle.norm()));

    // Full column rank: x = (A^T A)^{-1} A^T b, with a residual.
    const Matrix tall = a.transpose();
    const Vector c = gaussian_vec(rng, n);
    const Vector oracle2 = (tall.transpose() * tall).ldlt().solve(tall.transpose() * c);
    const LeastSquaresSolution ls2 = minnorm_lstsq(tall, c);
    CHECK((ls2.x - oracle2).norm() <= 1e-9 * (1.0 + oracle2.norm()));
    CHECK(ls2.residual_norm == doctest::Approx((tall * oracle2 - c).norm()).epsilon(1e-8));
  }
}

TEST_CASE("rank truncation follows the relative tolerance") {
  std::mt19937_64 rng(16);
  Vector sigma(3);
  sigma << 1.0, 1e-3, 1e-14;
  const Matrix a = with_singular_values(rng, 5, 4, sigma);
  CHECK(numerical_rank(a) == 3);
  CHECK(numerical_rank(a, 1e-12) == 2);
  CHECK(numerical_rank(a, 1e-2) == 1);
  CHECK(effective_condition(a, 1e-12) == doctest::Approx(1e3).epsilon(1e-6));

  // Truncated pseudoinverse oracle from a full SVD computed independently.
  const Vector b = gaussian_vec(rng, 5);
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vector oracle = Vector::Zero(4);
  for (Index i = 0; i < 2; ++i) {
    oracle += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(b) / svd.singularValues()(i));
  }
  CHECK((minnorm_solve(a, b, 1e-12) - oracle).norm() <= 1e-9 * oracle.norm());
}

TEST_CASE("transpose_pinv_apply solves the transposed system") {
  std::mt19937_64 rng(17);
  const Matrix s = gaussian(rng, 6, 3);
  const Vector delta = gaussian_vec(rng, 3);
  const Vector x = transpose_pinv_apply(s, delta);
  CHECK((s.transpose() * x - delta).norm() <= 1e-12);
  CHECK((x - cod_minnorm(s.transpose(), delta)).norm() <= 1e-12);
}

TEST_CASE("negative rank tolerance is rejected") {
  CHECK_THROWS_AS(numerical_rank(Matrix::Identity(2, 2), -1.0), Error);
}

TEST_CASE("default rank tolerance scales with size") {
  CHECK(default_rank_tol(3, 7) == doctest::Approx(7 * std::numeric_limits<double>::epsilon()));
}

}  // TEST_SUITE
