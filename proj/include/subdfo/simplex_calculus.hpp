#pragma once

#include <map>
#include <optional>
#include <vector>

#include "subdfo/interpolation.hpp"
#include "subdfo/linear_kernel.hpp"
#include "subdfo/sample_geometry.hpp"

namespace subdfo {

/// Direction matrix S = [s^1 ... s^p] plus the per-direction matrices
/// T_1..T_p used by the simplex Hessian. In shared mode a single T serves
/// every direction.
class DirectionBundle {
 public:
  static DirectionBundle shared(Matrix s, Matrix t);
  static DirectionBundle per_direction(Matrix s, std::vector<Matrix> t_list);

  Index dim() const noexcept { return s_.rows(); }
  Index size() const noexcept { return s_.cols(); }
  const Matrix& s() const noexcept { return s_; }
  const Matrix& t(Index i) const;
  bool is_shared() const noexcept { return shared_; }
  const std::vector<Matrix>& t_list() const noexcept { return t_; }

 private:
  DirectionBundle(Matrix s, std::vector<Matrix> t, bool shared);

  Matrix s_;
  std::vector<Matrix> t_;
  bool shared_ = false;
};

/// Memoized evaluations f(x0 + disp), keyed by the exact displacement
/// vector. Stencils that reach the same point through s + s and 2s share
/// one evaluation because both sums are bitwise identical.
class StencilEvaluations {
 public:
  StencilEvaluations(Vector base, FunctionOracle f);

  const Vector& base() const noexcept { return base_; }
  double at(const Vector& displacement);
  double base_value() { return at(Vector::Zero(base_.size())); }
  std::size_t size() const noexcept { return cache_.size(); }
  /// Every point evaluated so far as a sample set around the base.
  SampleSet consumed() const;

 private:
  Vector base_;
  FunctionOracle f_;
  std::map<std::vector<double>, double> cache_;
};

/// (S^T)^dagger delta_f(x0; S).
Vector gsg(const Vector& x0, const Matrix& s, const FunctionOracle& f,
           std::optional<double> rank_tol = {});
/// Simplex gradient at x0 + shift over S, reusing cached evaluations.
Vector gsg(StencilEvaluations& evals, const Vector& shift, const Matrix& s,
           std::optional<double> rank_tol = {});

/// (S^T)^dagger delta^2_f(x0; S; T_1..T_p). Generally nonsymmetric.
Matrix gsh(const Vector& x0, const DirectionBundle& bundle, const FunctionOracle& f,
           std::optional<double> rank_tol = {});
Matrix gsh(StencilEvaluations& evals, const DirectionBundle& bundle,
           std::optional<double> rank_tol = {});

SymMatrix symmetrize(const Matrix& h_raw);

enum class QgsdVariant {
  /// g = GSG over S, H = GSH.
  Simple,
  /// g = 2 GSG over S - GSG over 2S, H = GSH; needs shared T = S.
  Refined,
};

std::string_view to_string(QgsdVariant variant);
QgsdVariant qgsd_variant_from_string(std::string_view name);

/// Quadratic model from simplex derivatives. The result carries the sample
/// set the construction consumed, and the raw Hessian when not symmetrized.
ModelResult fit_qgsd(const Vector& x0, const DirectionBundle& bundle, const FunctionOracle& f,
                     QgsdVariant variant, bool symmetrize_hessian,
                     std::optional<double> rank_tol = {});

/// The QGSD sample set Y: x0, x0 + s^i, x0 + t_i^j and x0 + s^i + t_i^j.
/// Refined models additionally touch x0 + 2 s^i, which lies in Y when T = S.
std::vector<Vector> qgsd_displacements(const DirectionBundle& bundle);

}  // namespace subdfo
