#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>

#include "subdfo/linear_kernel.hpp"

namespace subdfo {

enum class DuplicatePolicy {
  /// Near-identical displacements with equal values are merged; with
  /// different values the set is rejected (DuplicateConflict).
  MergeOrReject,
  /// Keep every displacement as given. Lets feasibility checks see
  /// inconsistent data instead of failing at construction.
  Keep,
};

/// Y = {x0} u {x0 + d^i : i = 1..m} together with f on every point.
/// values(0) = f(x0), values(i) = f(x0 + d^i).
class SampleSet {
 public:
  SampleSet(Vector base, Matrix displacements, Vector values,
            DuplicatePolicy policy = DuplicatePolicy::MergeOrReject);

  Index dim() const noexcept { return base_.size(); }
  Index size() const noexcept { return displacements_.cols(); }

  const Vector& base() const noexcept { return base_; }
  /// n x m, one displacement per column.
  const Matrix& displacements() const noexcept { return displacements_; }
  const Vector& values() const noexcept { return values_; }
  double base_value() const { return values_(0); }
  Vector point(Index i) const { return base_ + displacements_.col(i); }
  /// delta_i = f(x0 + d^i) - f(x0).
  Vector value_differences() const;

 private:
  Vector base_;
  Matrix displacements_;
  Vector values_;
};

/// Matrix with orthonormal columns (checked to `tol` on construction).
class OrthonormalBasis {
 public:
  explicit OrthonormalBasis(Matrix q, double tol = 1e-10);

  const Matrix& matrix() const noexcept { return q_; }
  Index dim() const noexcept { return q_.cols(); }
  Index ambient() const noexcept { return q_.rows(); }
  /// Orthonormal basis of col(Q)^perp; deterministic given Q.
  const Matrix& complement() const noexcept { return complement_; }
  Matrix projector() const { return q_ * q_.transpose(); }

 private:
  Matrix q_;
  Matrix complement_;
};

/// The affine subspace {x0 + Q xhat} together with the coordinates of the
/// sample displacements in it.
class SubspaceFrame {
 public:
  SubspaceFrame(OrthonormalBasis basis, Vector base, Matrix hatted);

  /// Builds a frame for displacements already lying in col(Q); throws
  /// NotInSubspace if some ||d - Q Q^T d|| > tol * ||d||.
  static SubspaceFrame embed(OrthonormalBasis basis, Vector base,
                             const Matrix& displacements, double tol = 1e-10);

  const OrthonormalBasis& basis() const noexcept { return basis_; }
  const Matrix& q() const noexcept { return basis_.matrix(); }
  const Vector& base() const noexcept { return base_; }
  /// d x m hatted displacements.
  const Matrix& hatted() const noexcept { return hatted_; }
  Index dim() const noexcept { return basis_.dim(); }
  Index ambient() const noexcept { return basis_.ambient(); }

  Vector to_full(const Vector& xhat) const;
  /// Median norm of the hatted displacements, or 1 when there are none.
  double median_displacement_norm() const;

 private:
  OrthonormalBasis basis_;
  Vector base_;
  Matrix hatted_;
};

/// Deterministic scalar function with a shared evaluation counter. Copies
/// share the counter; the counter is atomic so a thread-safe callable may be
/// evaluated concurrently.
class FunctionOracle {
 public:
  using Callable = std::function<double(const Vector&)>;

  FunctionOracle(Index dim, Callable fn);

  double operator()(const Vector& x) const;
  Index dim() const noexcept { return dim_; }
  std::size_t evaluations() const noexcept { return counter_->load(); }

 private:
  Index dim_;
  Callable fn_;
  std::shared_ptr<std::atomic<std::size_t>> counter_;
};

SubspaceFrame detect_subspace(const SampleSet& samples,
                              std::optional<double> rank_tol = {});

/// xhat -> f(x0 + Q xhat). Evaluations also count against `f`.
FunctionOracle hat_function(const FunctionOracle& f, const SubspaceFrame& frame);

/// Sample set {0} u {dhat^i} in R^d with the same values.
SampleSet hat_sampleset(const SampleSet& samples, const SubspaceFrame& frame,
                        double tol = 1e-10);

/// Row i is [d^i^T, svec(d^i d^i^T)^T / 2], so that for unknowns
/// (alpha, svec(H)) the row evaluates d^T alpha + d^T H d / 2.
Matrix quadratic_constraint_matrix(const Matrix& displacements);

/// Number of unknowns of a quadratic in R^n excluding the constant term.
constexpr Index quadratic_unknowns(Index n) { return n + svec_length(n); }

bool poised_for_quadratic(const SampleSet& samples,
                          std::optional<double> rank_tol = {});

/// True when some quadratic interpolates the values, i.e. the least-squares
/// residual of the constraint system is at most
/// feas_tol * max(1, max|values|).
bool interpolation_feasible(const SampleSet& samples,
                            std::optional<double> rank_tol = {},
                            double feas_tol = 1e-9);

/// Residual norm of the minimum-norm least-squares fit of the constraint
/// system; zero when exactly feasible.
double interpolation_infeasibility(const SampleSet& samples,
                                   std::optional<double> rank_tol = {});

}  // namespace subdfo
