#pragma once

#include <random>

#include "subdfo/linear_kernel.hpp"

namespace testing {

using subdfo::Index;
using subdfo::Matrix;
using subdfo::Vector;

inline Matrix gaussian(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) a(i, j) = normal(rng);
  }
  return a;
}

inline Vector gaussian_vec(std::mt19937_64& rng, Index n) { return gaussian(rng, n, 1).col(0); }

inline Matrix gaussian_sym(std::mt19937_64& rng, Index n) {
  const Matrix g = gaussian(rng, n, n);
  return 0.5 * (g + g.transpose());
}

inline Index uniform(std::mt19937_64& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

/// Modified Gram-Schmidt; drops columns whose remainder is below `tol`
/// times the largest column norm.
inline Matrix gram_schmidt(const Matrix& a, double tol = 1e-10) {
  const double scale = a.size() ? a.colwise().norm().maxCoeff() : 0.0;
  Matrix q(a.rows(), 0);
  for (Index j = 0; j < a.cols(); ++j) {
    Vector v = a.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index k = 0; k < q.cols(); ++k) v -= q.col(k).dot(v) * q.col(k);
    }
    if (v.norm() > tol * scale) {
      q.conservativeResize(Eigen::NoChange, q.cols() + 1);
      q.col(q.cols() - 1) = v / v.norm();
    }
  }
  return q;
}

/// Orthogonal projector onto col(a).
inline Matrix projector(const Matrix& a, double tol = 1e-10) {
  const Matrix q = gram_schmidt(a, tol);
  return q * q.transpose();
}

inline double rel(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

/// Minimum-norm solution of a consistent system via complete orthogonal
/// decomposition, independent of the SVD path used by the library.
inline Vector cod_minnorm(const Matrix& a, const Vector& b) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  return cod.solve(b);
}

}  // namespace testing
