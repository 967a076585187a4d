#include "subdfo/linear_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "subdfo/errors.hpp"

namespace subdfo {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double resolve_tol(std::optional<double> tol, Index rows, Index cols) {
  if (!tol) return default_rank_tol(rows, cols);
  if (!(*tol >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "rank tolerance must be >= 0");
  }
  return *tol;
}

Index count_rank(const Vector& sigma, double tol) {
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  const double cut = tol * sigma(0);
  Index r = 0;
  while (r < sigma.size() && sigma(r) > cut) ++r;
  return r;
}

void fix_column_signs(Matrix& q) {
  for (Index j = 0; j < q.cols(); ++j) {
    Index pivot = 0;
    double best = -1.0;
    for (Index i = 0; i < q.rows(); ++i) {
      const double mag = std::abs(q(i, j));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (q(pivot, j) < 0.0) q.col(j) = -q.col(j);
  }
}

}  // namespace

double default_rank_tol(Index rows, Index cols) {
  return static_cast<double>(std::max<Index>({rows, cols, 1})) *
         std::numeric_limits<double>::epsilon();
}

void require_finite(const Matrix& a, std::string_view what) {
  if (!a.allFinite()) {
    throw Error(ErrorKind::NonFinite, std::string(what) + " contains NaN or Inf");
  }
}

void require_finite(const Vector& v, std::string_view what) {
  if (!v.allFinite()) {
    throw Error(ErrorKind::NonFinite, std::string(what) + " contains NaN or Inf");
  }
}

SymMatrix::SymMatrix(Index order) : m_(Matrix::Zero(order, order)) {}

SymMatrix SymMatrix::from_matrix(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::NotSquare, "symmetric matrix must be square");
  }
  require_finite(a, "symmetric matrix");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (a.size() > 0 && (a - a.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    throw Error(ErrorKind::InvalidArgument, "matrix is not symmetric");
  }
  return symmetric_part(a);
}

SymMatrix SymMatrix::symmetric_part(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::NotSquare, "symmetrize requires a square matrix");
  }
  SymMatrix s;
  // 0.5 * (a_ij + a_ji) is bitwise identical for (i,j) and (j,i).
  s.m_ = 0.5 * (a + a.transpose());
  return s;
}

SymMatrix SymMatrix::identity(Index order) {
  SymMatrix s;
  s.m_ = Matrix::Identity(order, order);
  return s;
}

void SymMatrix::set(Index i, Index j, double value) {
  m_(i, j) = value;
  m_(j, i) = value;
}

SVecCoords svec(const SymMatrix& h) {
  const Index n = h.order();
  SVecCoords out{n, Vector(svec_length(n))};
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    out.coords(k++) = h(i, i);
    for (Index j = i + 1; j < n; ++j) out.coords(k++) = kSqrt2 * h(i, j);
  }
  require_finite(out.coords, "svec input");
  return out;
}

SymMatrix smat(const SVecCoords& v) {
  if (v.coords.size() != svec_length(v.n)) {
    throw Error(ErrorKind::DimensionMismatch,
                "svec coordinates do not match order " + std::to_string(v.n));
  }
  require_finite(v.coords, "svec coordinates");
  SymMatrix h(v.n);
  Index k = 0;
  for (Index i = 0; i < v.n; ++i) {
    h.set(i, i, v.coords(k++));
    for (Index j = i + 1; j < v.n; ++j) h.set(i, j, v.coords(k++) / kSqrt2);
  }
  return h;
}

Vector svec_of_outer(const Vector& d) {
  const Index n = d.size();
  Vector out(svec_length(n));
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    out(k++) = d(i) * d(i);
    for (Index j = i + 1; j < n; ++j) out(k++) = kSqrt2 * d(i) * d(j);
  }
  return out;
}

OrthonormalFactor orthonormal_columns(const Matrix& a,
                                      std::optional<double> rank_tol) {
  if (a.cols() < 1) {
    throw Error(ErrorKind::InvalidArgument,
                "orthonormal_columns needs at least one column");
  }
  require_finite(a, "orthonormal_columns input");
  const double tol = resolve_tol(rank_tol, a.rows(), a.cols());

  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  OrthonormalFactor out;
  out.singular_values = svd.singularValues();
  out.rank = count_rank(out.singular_values, tol);
  out.q = svd.matrixU().leftCols(out.rank);
  fix_column_signs(out.q);
  return out;
}

double orthonormality_defect(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).norm();
}

Matrix orthonormal_complement(const Matrix& q) {
  require_finite(q, "basis");
  if (q.cols() > q.rows() || orthonormality_defect(q) > 1e-10) {
    throw Error(ErrorKind::NotOrthonormal,
                "basis columns are not orthonormal to 1e-10");
  }
  const Index n = q.rows();
  const Index k = n - q.cols();
  if (k == 0) return Matrix(n, 0);
  const Matrix projector = Matrix::Identity(n, n) - q * q.transpose();
  // The projector has singular values 1 (k times) and 0 (d times); the
  // leading k left singular vectors span the complement.
  Eigen::JacobiSVD<Matrix> svd(projector, Eigen::ComputeThinU);
  Matrix out = svd.matrixU().leftCols(k);
  // Remove the tiny component along col(Q) left by roundoff, then
  // re-orthonormalize.
  out -= q * (q.transpose() * out);
  Eigen::HouseholderQR<Matrix> qr(out);
  Matrix basis = qr.householderQ() * Matrix::Identity(n, k);
  fix_column_signs(basis);
  return basis;
}

LeastSquaresSolution minnorm_lstsq(const Matrix& a, const Vector& b,
                                   std::optional<double> rank_tol) {
  if (a.rows() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch, "least-squares rhs length");
  }
  require_finite(a, "least-squares matrix");
  require_finite(b, "least-squares rhs");
  const double tol = resolve_tol(rank_tol, a.rows(), a.cols());

  LeastSquaresSolution out;
  if (a.cols() == 0) {
    out.x = Vector(0);
    out.nullspace = Matrix(0, 0);
    out.residual_norm = b.norm();
    return out;
  }
  if (a.rows() == 0) {
    out.x = Vector::Zero(a.cols());
    out.nullspace = Matrix::Identity(a.cols(), a.cols());
    return out;
  }

  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  out.rank = count_rank(sigma, tol);
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  Vector coeff = u.leftCols(out.rank).transpose() * b;
  for (Index i = 0; i < out.rank; ++i) coeff(i) /= sigma(i);
  out.x = v.leftCols(out.rank) * coeff;
  out.nullspace = v.rightCols(a.cols() - out.rank);
  fix_column_signs(out.nullspace);
  out.residual_norm = (a * out.x - b).norm();
  return out;
}

Vector minnorm_solve(const Matrix& a, const Vector& b,
                     std::optional<double> rank_tol) {
  if (a.rows() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch, "least-squares rhs length");
  }
  require_finite(a, "least-squares matrix");
  require_finite(b, "least-squares rhs");
  const double tol = resolve_tol(rank_tol, a.rows(), a.cols());
  if (a.rows() == 0 || a.cols() == 0) return Vector::Zero(a.cols());

  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const Index r = count_rank(sigma, tol);
  Vector coeff = svd.matrixU().leftCols(r).transpose() * b;
  for (Index i = 0; i < r; ++i) coeff(i) /= sigma(i);
  return svd.matrixV().leftCols(r) * coeff;
}

Vector transpose_pinv_apply(const Matrix& a, const Vector& b,
                            std::optional<double> rank_tol) {
  return minnorm_solve(a.transpose(), b, rank_tol);
}

Index numerical_rank(const Matrix& a, std::optional<double> rank_tol) {
  if (a.size() == 0) return 0;
  require_finite(a, "rank input");
  const double tol = resolve_tol(rank_tol, a.rows(), a.cols());
  Eigen::JacobiSVD<Matrix> svd(a);
  return count_rank(svd.singularValues(), tol);
}

double effective_condition(const Matrix& a, std::optional<double> rank_tol) {
  if (a.size() == 0) return 1.0;
  require_finite(a, "condition input");
  const double tol = resolve_tol(rank_tol, a.rows(), a.cols());
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& sigma = svd.singularValues();
  const Index r = count_rank(sigma, tol);
  if (r == 0) return 1.0;
  return sigma(0) / sigma(r - 1);
}

}  // namespace subdfo
