#pragma once

// Dense linear-algebra primitives shared by every other module: rank-revealing
// orthonormal bases, minimum-norm least squares through a truncated SVD, and
// the isometric vectorization of symmetric matrices.

#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace subdfo {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative rank threshold used when the caller passes no explicit value:
/// max(rows, cols) * machine epsilon. Singular values at or below
/// `rank_tol * sigma_max` are treated as zero.
double default_rank_tol(Index rows, Index cols);

/// Throws Error{NonFinite} if any entry is NaN or infinite.
void require_finite(const Matrix& a, std::string_view what);
void require_finite(const Vector& v, std::string_view what);

/// Real symmetric matrix. The stored entries are exactly mirrored.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index order);

  /// Accepts `a` if it is symmetric to `tol` (relative to max(1, max|a|)),
  /// then stores the exactly symmetric average of `a` and its transpose.
  static SymMatrix from_matrix(const Matrix& a, double tol = 1e-12);
  /// (a + a^T) / 2 for any square matrix.
  static SymMatrix symmetric_part(const Matrix& a);
  static SymMatrix identity(Index order);
  static SymMatrix zero(Index order) { return SymMatrix(order); }

  Index order() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }
  double frobenius_norm() const { return m_.norm(); }

  /// Sets entries (i, j) and (j, i).
  void set(Index i, Index j, double value);

 private:
  Matrix m_;
};

/// Coordinates of a symmetric matrix in the orthonormal basis where
/// off-diagonal entries carry a factor sqrt(2). Ordering is the upper
/// triangle, row by row: (0,0), (0,1), ..., (0,n-1), (1,1), ...
struct SVecCoords {
  Index n = 0;
  Vector coords;
};

/// n(n+1)/2.
constexpr Index svec_length(Index n) { return n * (n + 1) / 2; }

SVecCoords svec(const SymMatrix& h);
SymMatrix smat(const SVecCoords& v);

/// svec(d d^T) without forming the outer product.
Vector svec_of_outer(const Vector& d);

struct OrthonormalFactor {
  Matrix q;               // rows(A) x rank
  Index rank = 0;
  Vector singular_values;  // all singular values, descending
};

/// Orthonormal basis of col(A) ordered by decreasing singular value. Each
/// column is signed so that its first entry of largest magnitude is positive.
OrthonormalFactor orthonormal_columns(const Matrix& a,
                                      std::optional<double> rank_tol = {});

/// ||Q^T Q - I||_F.
double orthonormality_defect(const Matrix& q);

/// Orthonormal basis of col(Q)^perp with n - d columns. Q must have
/// orthonormal columns to 1e-10.
Matrix orthonormal_complement(const Matrix& q);

struct LeastSquaresSolution {
  Vector x;          // minimum-norm minimizer of ||A x - b||
  Matrix nullspace;  // orthonormal basis of null(A)
  Index rank = 0;
  double residual_norm = 0.0;
};

/// Minimum-norm least-squares solution through a rank-truncated SVD.
LeastSquaresSolution minnorm_lstsq(const Matrix& a, const Vector& b,
                                   std::optional<double> rank_tol = {});

/// Same solution as minnorm_lstsq without forming the nullspace basis.
Vector minnorm_solve(const Matrix& a, const Vector& b,
                     std::optional<double> rank_tol = {});

/// (A^T)^dagger b, i.e. the minimum-norm solution of A^T x = b.
Vector transpose_pinv_apply(const Matrix& a, const Vector& b,
                            std::optional<double> rank_tol = {});

Index numerical_rank(const Matrix& a, std::optional<double> rank_tol = {});

/// sigma_max / sigma_min over the nonzero (at rank_tol) singular values.
double effective_condition(const Matrix& a,
                           std::optional<double> rank_tol = {});

}  // namespace subdfo
