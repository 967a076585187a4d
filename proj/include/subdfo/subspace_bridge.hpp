#pragma once

// Conversions between models built in the full space R^n and models built
// in the coordinates of an affine subspace {x0 + Q xhat}.
//
//   MN, DQI:  g = Q ghat,  H = Q Hhat Q^T
//   MFN:      H = Q Hhat Q^T,  G_full = Q G_sub + col(Q)^perp
//   LFU:      H = Q Hhat Q^T + Hbar - Q Q^T Hbar Q Q^T,  Hhat-bar = Q^T Hbar Q
//   GSG/GSH:  g = Q ghat,  H = Q Hhat Q^T  when S = Q Shat and T_i = Q That_i
//
// Full and lifted models agree on the subspace; whether they also agree
// along col(Q)^perp depends on the model (see coincidence_check).

#include <cstdint>
#include <optional>

#include "subdfo/interpolation.hpp"
#include "subdfo/sample_geometry.hpp"
#include "subdfo/simplex_calculus.hpp"

namespace subdfo {

struct ConversionReport {
  double gradient_gap = 0.0;  // ||g_full - Q g_sub|| (canonical members)
  double hessian_gap = 0.0;   // ||H_full - lifted Hessian||_F
  double subspace_value_gap = 0.0;    // max |m(x0 + Q xhat) - mhat(xhat)|
  double orthogonal_value_gap = 0.0;  // max |m(x0 + Q xhat + v) - mhat(xhat)|
  /// Gap at the deterministic probes x0 + scale * (column of Q_perp), xhat = 0.
  double axis_orthogonal_gap = 0.0;
  /// max(1, largest |model value| seen at any probe); divides gaps to make
  /// them dimensionless.
  double value_scale = 1.0;
  bool correction_applied = false;  // LFU reference not supported on col(Q)
  std::uint64_t seed = 0;
  Index probes = 0;
  double scale = 1.0;
};

Vector lift_gradient(const Vector& g_sub, const SubspaceFrame& frame);
Matrix lift_hessian(const Matrix& h_sub, const SubspaceFrame& frame);
Vector restrict_gradient(const Vector& g_full, const SubspaceFrame& frame);
Matrix restrict_hessian(const Matrix& h_full, const SubspaceFrame& frame);

/// Hbar - Q Q^T Hbar Q Q^T.
Matrix lfu_correction(const SymMatrix& href, const SubspaceFrame& frame);
bool lfu_correction_applied(const SymMatrix& href, const SubspaceFrame& frame);

/// Full-space MN model from a subspace MN (or DQI) model.
ModelResult lift_mn(const ModelResult& sub, const SubspaceFrame& frame);

/// Full-space MFN model. The ambiguity basis is Q * (sub ambiguity) joined
/// with an orthonormal basis of col(Q)^perp.
ModelResult lift_mfn(const ModelResult& sub, const SubspaceFrame& frame);

/// Full-space LFU model for reference `href_full`. Throws ReferenceMismatch
/// if the subspace model was not fit with Q^T href_full Q.
ModelResult lift_lfu(const ModelResult& sub, const SubspaceFrame& frame,
                     const SymMatrix& href_full);

/// Full-space QGSD model: g = Q ghat, H = Q Hhat Q^T (raw Hessian lifted too).
ModelResult lift_qgsd(const ModelResult& sub, const SubspaceFrame& frame);

/// Subspace coordinates of a direction bundle: Shat = Q^T S, That_i = Q^T T_i.
/// Throws NotInSubspace if some column leaves col(Q).
DirectionBundle hat_bundle(const DirectionBundle& bundle, const SubspaceFrame& frame,
                           double tol = 1e-10);

/// Subspace counterpart of a full-space model: ghat = Q^T g, Hhat = Q^T H Q,
/// Q^T A re-orthonormalized with columns that vanish dropped.
ModelResult restrict_model(const ModelResult& full, const SubspaceFrame& frame);

/// m(x0 + Q xhat + v) - mhat(xhat).
double probe_gap(const QuadraticModel& full, const QuadraticModel& sub,
                 const SubspaceFrame& frame, const Vector& xhat, const Vector& v);

/// Compares model values on `probes` random points of the subspace and on
/// the same points shifted by random v in col(Q)^perp. Probes are standard
/// normal times `scale` (default: median hatted displacement norm).
ConversionReport coincidence_check(const QuadraticModel& full, const QuadraticModel& sub,
                                   const SubspaceFrame& frame, Index probes,
                                   std::uint64_t seed,
                                   std::optional<double> scale = {});

/// coincidence_check plus coefficient gaps against the lift of `sub`. For
/// LFU the lift uses the full model's reference Hessian.
ConversionReport compare_models(const ModelResult& full, const ModelResult& sub,
                                const SubspaceFrame& frame, Index probes,
                                std::uint64_t seed, std::optional<double> scale = {});

}  // namespace subdfo
