#include "subdfo/sample_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "subdfo/errors.hpp"

namespace subdfo {
namespace {

constexpr double kDedupTol = 1e-12;

bool values_match(double a, double b) {
  return std::abs(a - b) <= kDedupTol * std::max({1.0, std::abs(a), std::abs(b)});
}

bool same_point(const Vector& a, const Vector& b) {
  return (a - b).norm() <= kDedupTol * std::max({a.norm(), b.norm(), 1.0});
}

}  // namespace

SampleSet::SampleSet(Vector base, Matrix displacements, Vector values,
                     DuplicatePolicy policy) {
  if (displacements.rows() != base.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "displacements must have " + std::to_string(base.size()) + " rows");
  }
  if (values.size() != displacements.cols() + 1) {
    throw Error(ErrorKind::DimensionMismatch,
                "values must have m+1 = " + std::to_string(displacements.cols() + 1) +
                    " entries");
  }
  require_finite(base, "base point");
  require_finite(displacements, "displacements");
  require_finite(values, "function values");

  if (policy == DuplicatePolicy::Keep) {
    base_ = std::move(base);
    displacements_ = std::move(displacements);
    values_ = std::move(values);
    return;
  }

  // A zero displacement duplicates x0 itself.
  const Index n = base.size();
  std::vector<Index> kept;
  const Vector origin = Vector::Zero(n);
  for (Index i = 0; i < displacements.cols(); ++i) {
    const Vector d = displacements.col(i);
    const double fi = values(i + 1);
    bool duplicate = false;
    if (same_point(d, origin)) {
      if (!values_match(fi, values(0))) {
        throw Error(ErrorKind::DuplicateConflict,
                    "displacement " + std::to_string(i) +
                        " coincides with x0 but has a different value");
      }
      duplicate = true;
    }
    for (Index k : kept) {
      if (duplicate) break;
      if (same_point(d, displacements.col(k))) {
        if (!values_match(fi, values(k + 1))) {
          throw Error(ErrorKind::DuplicateConflict,
                      "displacements " + std::to_string(k) + " and " +
                          std::to_string(i) + " coincide with different values");
        }
        duplicate = true;
      }
    }
    if (!duplicate) kept.push_back(i);
  }

  base_ = std::move(base);
  displacements_.resize(n, static_cast<Index>(kept.size()));
  values_.resize(static_cast<Index>(kept.size()) + 1);
  values_(0) = values(0);
  for (Index j = 0; j < static_cast<Index>(kept.size()); ++j) {
    displacements_.col(j) = displacements.col(kept[j]);
    values_(j + 1) = values(kept[j] + 1);
  }
}

Vector SampleSet::value_differences() const {
  return values_.tail(size()).array() - values_(0);
}

OrthonormalBasis::OrthonormalBasis(Matrix q, double tol) : q_(std::move(q)) {
  require_finite(q_, "basis");
  if (q_.cols() > q_.rows() || orthonormality_defect(q_) > tol) {
    throw Error(ErrorKind::NotOrthonormal, "basis columns are not orthonormal");
  }
  complement_ = orthonormal_complement(q_);
}

SubspaceFrame::SubspaceFrame(OrthonormalBasis basis, Vector base, Matrix hatted)
    : basis_(std::move(basis)), base_(std::move(base)), hatted_(std::move(hatted)) {
  if (base_.size() != basis_.ambient()) {
    throw Error(ErrorKind::DimensionMismatch, "frame base has wrong dimension");
  }
  if (hatted_.rows() != basis_.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "hatted displacements must have d rows");
  }
  require_finite(base_, "frame base");
  require_finite(hatted_, "hatted displacements");
}

SubspaceFrame SubspaceFrame::embed(OrthonormalBasis basis, Vector base,
                                   const Matrix& displacements, double tol) {
  if (displacements.rows() != basis.ambient()) {
    throw Error(ErrorKind::DimensionMismatch,
                "displacements do not match the basis dimension");
  }
  const Matrix& q = basis.matrix();
  Matrix hatted = q.transpose() * displacements;
  for (Index i = 0; i < displacements.cols(); ++i) {
    const double scale = displacements.col(i).norm();
    const double residual = (displacements.col(i) - q * hatted.col(i)).norm();
    if (residual > tol * scale) {
      throw Error(ErrorKind::NotInSubspace,
                  "displacement " + std::to_string(i) +
                      " is not in col(Q): residual " + std::to_string(residual),
                  residual);
    }
  }
  return SubspaceFrame(std::move(basis), std::move(base), std::move(hatted));
}

Vector SubspaceFrame::to_full(const Vector& xhat) const {
  if (xhat.size() != dim()) {
    throw Error(ErrorKind::DimensionMismatch, "subspace point has wrong dimension");
  }
  return base_ + q() * xhat;
}

double SubspaceFrame::median_displacement_norm() const {
  if (hatted_.cols() == 0) return 1.0;
  std::vector<double> norms(static_cast<std::size_t>(hatted_.cols()));
  for (Index i = 0; i < hatted_.cols(); ++i) norms[static_cast<std::size_t>(i)] = hatted_.col(i).norm();
  std::sort(norms.begin(), norms.end());
  const std::size_t k = norms.size();
  const double med = (k % 2 == 1) ? norms[k / 2] : 0.5 * (norms[k / 2 - 1] + norms[k / 2]);
  return med > 0.0 ? med : 1.0;
}

FunctionOracle::FunctionOracle(Index dim, Callable fn)
    : dim_(dim),
      fn_(std::move(fn)),
      counter_(std::make_shared<std::atomic<std::size_t>>(0)) {
  if (!fn_) throw Error(ErrorKind::InvalidArgument, "empty function oracle");
}

double FunctionOracle::operator()(const Vector& x) const {
  if (x.size() != dim_) {
    throw Error(ErrorKind::DimensionMismatch,
                "oracle expects dimension " + std::to_string(dim_) + ", got " +
                    std::to_string(x.size()));
  }
  counter_->fetch_add(1, std::memory_order_relaxed);
  return fn_(x);
}

SubspaceFrame detect_subspace(const SampleSet& samples,
                              std::optional<double> rank_tol) {
  if (samples.size() == 0) {
    throw Error(ErrorKind::EmptySet, "sample set has no displacements");
  }
  OrthonormalFactor factor = orthonormal_columns(samples.displacements(), rank_tol);
  if (factor.rank == 0) {
    throw Error(ErrorKind::EmptySet, "all displacements are numerically zero");
  }
  OrthonormalBasis basis(std::move(factor.q));
  Matrix hatted = basis.matrix().transpose() * samples.displacements();
  return SubspaceFrame(std::move(basis), samples.base(), std::move(hatted));
}

FunctionOracle hat_function(const FunctionOracle& f, const SubspaceFrame& frame) {
  if (f.dim() != frame.ambient()) {
    throw Error(ErrorKind::DimensionMismatch,
                "oracle dimension differs from the frame's ambient dimension");
  }
  const Matrix q = frame.q();
  const Vector base = frame.base();
  return FunctionOracle(frame.dim(), [f, q, base](const Vector& xhat) {
    return f(base + q * xhat);
  });
}

SampleSet hat_sampleset(const SampleSet& samples, const SubspaceFrame& frame,
                        double tol) {
  if (samples.dim() != frame.ambient()) {
    throw Error(ErrorKind::DimensionMismatch,
                "sample set dimension differs from the frame's ambient dimension");
  }
  const Matrix& q = frame.q();
  const Matrix& d = samples.displacements();
  Matrix hatted = q.transpose() * d;
  for (Index i = 0; i < d.cols(); ++i) {
    const double residual = (d.col(i) - q * hatted.col(i)).norm();
    if (residual > tol * d.col(i).norm()) {
      throw Error(ErrorKind::NotInSubspace,
                  "displacement " + std::to_string(i) + " leaves the subspace",
                  residual);
    }
  }
  // Hatted points stay distinct because Q is an isometry on col(Q).
  return SampleSet(Vector::Zero(frame.dim()), std::move(hatted), samples.values(),
                   DuplicatePolicy::Keep);
}

Matrix quadratic_constraint_matrix(const Matrix& displacements) {
  const Index n = displacements.rows();
  const Index m = displacements.cols();
  Matrix a(m, quadratic_unknowns(n));
  for (Index i = 0; i < m; ++i) {
    const Vector d = displacements.col(i);
    a.row(i).head(n) = d.transpose();
    a.row(i).tail(svec_length(n)) = 0.5 * svec_of_outer(d).transpose();
  }
  return a;
}

bool poised_for_quadratic(const SampleSet& samples, std::optional<double> rank_tol) {
  const Index n = samples.dim();
  if (samples.size() + 1 != (n + 1) * (n + 2) / 2) return false;
  // The row for x0 is (1, 0, ..., 0), so the full system is nonsingular
  // exactly when the square constraint block is.
  const Matrix a = quadratic_constraint_matrix(samples.displacements());
  return numerical_rank(a, rank_tol) == a.rows();
}

double interpolation_infeasibility(const SampleSet& samples,
                                   std::optional<double> rank_tol) {
  if (samples.size() == 0) return 0.0;
  const Matrix a = quadratic_constraint_matrix(samples.displacements());
  const Vector delta = samples.value_differences();
  const Vector x = minnorm_solve(a, delta, rank_tol);
  return (a * x - delta).norm();
}

bool interpolation_feasible(const SampleSet& samples, std::optional<double> rank_tol,
                            double feas_tol) {
  const double scale = std::max(1.0, samples.values().cwiseAbs().maxCoeff());
  return interpolation_infeasibility(samples, rank_tol) <= feas_tol * scale;
}

}  // namespace subdfo
