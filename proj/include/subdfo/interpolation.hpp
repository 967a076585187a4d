#pragma once

#include <optional>
#include <string_view>

#include "subdfo/linear_kernel.hpp"
#include "subdfo/sample_geometry.hpp"

namespace subdfo {

enum class ModelKind { DQI, MN, MFN, LFU, QGSD };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

/// m(x) = c + g^T (x - x0) + (x - x0)^T H (x - x0) / 2.
struct QuadraticModel {
  Vector base;
  double constant = 0.0;
  Vector gradient;
  SymMatrix hessian;

  Index dim() const noexcept { return base.size(); }
  double evaluate(const Vector& x) const;
};

double evaluate(const QuadraticModel& model, const Vector& x);

/// Affine set {canonical + A c}. `canonical` is the minimum-norm member,
/// so it is orthogonal to every column of the ambiguity basis A.
struct GradientFamily {
  Vector canonical;
  Matrix ambiguity_basis;  // n x k, orthonormal columns, k may be 0

  Index freedom() const noexcept { return ambiguity_basis.cols(); }
  Vector member(const Vector& coeffs) const;
  /// Distance from g to the family.
  double distance(const Vector& g) const;
};

Vector member(const GradientFamily& family, const Vector& coeffs);

struct ModelResult {
  QuadraticModel model;  // gradient is the canonical member
  GradientFamily gradients;
  ModelKind kind = ModelKind::MN;
  /// H-bar for LFU models.
  std::optional<SymMatrix> reference_hessian;
  /// Unsymmetrized simplex Hessian for QGSD models built without
  /// symmetrization. `model.hessian` always holds its symmetric part, which
  /// yields the same model values.
  std::optional<Matrix> raw_hessian;
  /// Every point a QGSD construction evaluated.
  std::optional<SampleSet> consumed;

  /// The model obtained by swapping in another member of the gradient family.
  QuadraticModel with_gradient(const Vector& g) const;
};

struct FitOptions {
  std::optional<double> rank_tol;
  /// Constraint residual allowed, relative to max(1, max|f|).
  double feasibility_tol = 1e-9;
};

/// max_i |m(x0 + d^i) - f(x0 + d^i)| over the sample set, including x0.
double interpolation_residual(const QuadraticModel& model, const SampleSet& samples);

/// Determined quadratic interpolation. Throws NotPoised unless
/// poised_for_quadratic(samples).
ModelResult fit_dqi(const SampleSet& samples, const FitOptions& options = {});

/// Minimizes ||alpha||^2/2 + ||H||_F^2/2 subject to interpolation, as one
/// minimum-norm solve in (alpha, svec H) coordinates.
ModelResult fit_mn(const SampleSet& samples, const FitOptions& options = {});

/// Minimizes ||H||_F^2/2 subject to interpolation. The Hessian is unique;
/// the gradient family is canonical + null(D^T).
ModelResult fit_mfn(const SampleSet& samples, const FitOptions& options = {});

/// Minimizes ||H - href||_F^2/2 subject to interpolation, by reduction to
/// the MFN problem on shifted data.
ModelResult fit_lfu(const SampleSet& samples, const SymMatrix& href,
                    const FitOptions& options = {});

}  // namespace subdfo
