#include "subdfo/subspace_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "subdfo/errors.hpp"

namespace subdfo {
namespace {

constexpr double kDropTol = 1e-12;

void require_sub_dim(const ModelResult& sub, const SubspaceFrame& frame) {
  if (sub.model.dim() != frame.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "subspace model has dimension " + std::to_string(sub.model.dim()) +
                    ", frame has d = " + std::to_string(frame.dim()));
  }
}

void require_full_dim(Index n, const SubspaceFrame& frame) {
  if (n != frame.ambient()) {
    throw Error(ErrorKind::DimensionMismatch,
                "full-space object has dimension " + std::to_string(n) +
                    ", frame has n = " + std::to_string(frame.ambient()));
  }
}

// Lift of gradient, Hessian and constant shared by every model kind.
ModelResult lift_common(const ModelResult& sub, const SubspaceFrame& frame, ModelKind kind) {
  require_sub_dim(sub, frame);
  ModelResult out;
  out.kind = kind;
  out.model.base = frame.base();
  out.model.constant = sub.model.constant;
  out.model.gradient = lift_gradient(sub.model.gradient, frame);
  out.model.hessian = SymMatrix::symmetric_part(lift_hessian(sub.model.hessian.matrix(), frame));
  out.gradients.canonical = out.model.gradient;
  out.gradients.ambiguity_basis = Matrix(frame.ambient(), 0);
  return out;
}

// Q * (sub ambiguity) joined with Q_perp. Both blocks are orthonormal and
// mutually orthogonal, so the union needs no further orthogonalization.
Matrix lifted_ambiguity(const GradientFamily& sub, const SubspaceFrame& frame) {
  const Matrix inside = frame.q() * sub.ambiguity_basis;
  const Matrix& outside = frame.basis().complement();
  Matrix out(frame.ambient(), inside.cols() + outside.cols());
  out << inside, outside;
  return out;
}

}  // namespace

Vector lift_gradient(const Vector& g_sub, const SubspaceFrame& frame) {
  if (g_sub.size() != frame.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "subspace gradient has wrong dimension");
  }
  return frame.q() * g_sub;
}

Matrix lift_hessian(const Matrix& h_sub, const SubspaceFrame& frame) {
  if (h_sub.rows() != frame.dim() || h_sub.cols() != frame.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "subspace Hessian has wrong dimension");
  }
  return frame.q() * h_sub * frame.q().transpose();
}

Vector restrict_gradient(const Vector& g_full, const SubspaceFrame& frame) {
  require_full_dim(g_full.size(), frame);
  return frame.q().transpose() * g_full;
}

Matrix restrict_hessian(const Matrix& h_full, const SubspaceFrame& frame) {
  if (h_full.rows() != frame.ambient() || h_full.cols() != frame.ambient()) {
    throw Error(ErrorKind::DimensionMismatch, "full-space Hessian has wrong dimension");
  }
  return frame.q().transpose() * h_full * frame.q();
}

Matrix lfu_correction(const SymMatrix& href, const SubspaceFrame& frame) {
  require_full_dim(href.order(), frame);
  const Matrix p = frame.basis().projector();
  return href.matrix() - p * href.matrix() * p;
}

bool lfu_correction_applied(const SymMatrix& href, const SubspaceFrame& frame) {
  return lfu_correction(href, frame).norm() > 1e-12;
}

ModelResult lift_mn(const ModelResult& sub, const SubspaceFrame& frame) {
  if (sub.kind != ModelKind::MN && sub.kind != ModelKind::DQI) {
    throw Error(ErrorKind::InvalidArgument, "lift_mn expects an MN or DQI model");
  }
  return lift_common(sub, frame, ModelKind::MN);
}

ModelResult lift_mfn(const ModelResult& sub, const SubspaceFrame& frame) {
  if (sub.kind != ModelKind::MFN) {
    throw Error(ErrorKind::InvalidArgument, "lift_mfn expects an MFN model");
  }
  ModelResult out = lift_common(sub, frame, ModelKind::MFN);
  out.gradients.ambiguity_basis = lifted_ambiguity(sub.gradients, frame);
  return out;
}

ModelResult lift_lfu(const ModelResult& sub, const SubspaceFrame& frame,
                     const SymMatrix& href_full) {
  if (sub.kind != ModelKind::LFU) {
    throw Error(ErrorKind::InvalidArgument, "lift_lfu expects an LFU model");
  }
  require_sub_dim(sub, frame);
  require_full_dim(href_full.order(), frame);
  const Matrix href_sub = restrict_hessian(href_full.matrix(), frame);
  if (!sub.reference_hessian) {
    throw Error(ErrorKind::ReferenceMismatch, "subspace LFU model carries no reference Hessian");
  }
  const double mismatch = (sub.reference_hessian->matrix() - href_sub).cwiseAbs().maxCoeff();
  if (mismatch > 1e-10 * std::max(1.0, href_sub.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::ReferenceMismatch,
                "subspace reference differs from Q^T Hbar Q by " + std::to_string(mismatch),
                mismatch);
  }
  ModelResult out = lift_common(sub, frame, ModelKind::LFU);
  out.model.hessian = SymMatrix::symmetric_part(lift_hessian(sub.model.hessian.matrix(), frame) +
                                                lfu_correction(href_full, frame));
  out.gradients.ambiguity_basis = lifted_ambiguity(sub.gradients, frame);
  out.reference_hessian = href_full;
  return out;
}

ModelResult lift_qgsd(const ModelResult& sub, const SubspaceFrame& frame) {
  if (sub.kind != ModelKind::QGSD) {
    throw Error(ErrorKind::InvalidArgument, "lift_qgsd expects a QGSD model");
  }
  ModelResult out = lift_common(sub, frame, ModelKind::QGSD);
  if (sub.raw_hessian) out.raw_hessian = lift_hessian(*sub.raw_hessian, frame);
  return out;
}

DirectionBundle hat_bundle(const DirectionBundle& bundle, const SubspaceFrame& frame,
                           double tol) {
  require_full_dim(bundle.dim(), frame);
  const Matrix& q = frame.q();
  auto hat = [&](const Matrix& a, const char* what) {
    Matrix out = q.transpose() * a;
    for (Index j = 0; j < a.cols(); ++j) {
      const double residual = (a.col(j) - q * out.col(j)).norm();
      if (residual > tol * a.col(j).norm()) {
        throw Error(ErrorKind::NotInSubspace,
                    std::string(what) + " column " + std::to_string(j) + " leaves col(Q)",
                    residual);
      }
    }
    return out;
  };
  Matrix s_hat = hat(bundle.s(), "S");
  if (bundle.is_shared()) return DirectionBundle::shared(std::move(s_hat), hat(bundle.t(0), "T"));
  std::vector<Matrix> t_hat;
  t_hat.reserve(bundle.t_list().size());
  for (const Matrix& t : bundle.t_list()) t_hat.push_back(hat(t, "T"));
  return DirectionBundle::per_direction(std::move(s_hat), std::move(t_hat));
}

ModelResult restrict_model(const ModelResult& full, const SubspaceFrame& frame) {
  require_full_dim(full.model.dim(), frame);
  const Index d = frame.dim();
  ModelResult out;
  out.kind = full.kind;
  out.model.base = Vector::Zero(d);
  out.model.constant = full.model.constant;
  out.model.gradient = restrict_gradient(full.model.gradient, frame);
  out.model.hessian =
      SymMatrix::symmetric_part(restrict_hessian(full.model.hessian.matrix(), frame));
  out.gradients.canonical = restrict_gradient(full.gradients.canonical, frame);
  out.gradients.ambiguity_basis = Matrix(d, 0);
  if (full.gradients.freedom() > 0 && d > 0) {
    const Matrix projected = frame.q().transpose() * full.gradients.ambiguity_basis;
    OrthonormalFactor factor = orthonormal_columns(projected, 0.0);
    Index keep = 0;
    while (keep < factor.rank && factor.singular_values(keep) > kDropTol) ++keep;
    out.gradients.ambiguity_basis = factor.q.leftCols(keep);
  }
  if (full.reference_hessian) {
    out.reference_hessian =
        SymMatrix::symmetric_part(restrict_hessian(full.reference_hessian->matrix(), frame));
  }
  if (full.raw_hessian) out.raw_hessian = restrict_hessian(*full.raw_hessian, frame);
  if (full.consumed) out.consumed = hat_sampleset(*full.consumed, frame);
  return out;
}

double probe_gap(const QuadraticModel& full, const QuadraticModel& sub,
                 const SubspaceFrame& frame, const Vector& xhat, const Vector& v) {
  require_full_dim(full.dim(), frame);
  if (sub.dim() != frame.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "subspace model has wrong dimension");
  }
  if (v.size() != frame.ambient()) {
    throw Error(ErrorKind::DimensionMismatch, "orthogonal offset has wrong dimension");
  }
  return full.evaluate(frame.to_full(xhat) + v) - sub.evaluate(xhat);
}

ConversionReport coincidence_check(const QuadraticModel& full, const QuadraticModel& sub,
                                   const SubspaceFrame& frame, Index probes,
                                   std::uint64_t seed, std::optional<double> scale) {
  require_full_dim(full.dim(), frame);
  if (sub.dim() != frame.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "subspace model has wrong dimension");
  }
  ConversionReport report;
  report.seed = seed;
  report.probes = probes;
  report.scale = scale.value_or(frame.median_displacement_norm());

  const Index d = frame.dim();
  const Index n = frame.ambient();
  const Matrix& perp = frame.basis().complement();
  const Vector no_offset = Vector::Zero(n);

  auto track = [&](const Vector& xhat, const Vector& v) {
    report.value_scale = std::max({report.value_scale, std::abs(sub.evaluate(xhat)),
                                   std::abs(full.evaluate(frame.to_full(xhat) + v))});
    return std::abs(probe_gap(full, sub, frame, xhat, v));
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index k = 0; k < probes; ++k) {
    Vector xhat(d);
    for (Index i = 0; i < d; ++i) xhat(i) = report.scale * normal(rng);
    Vector w(perp.cols());
    for (Index i = 0; i < w.size(); ++i) w(i) = report.scale * normal(rng);
    const Vector v = perp.cols() > 0 ? Vector(perp * w) : no_offset;
    report.subspace_value_gap = std::max(report.subspace_value_gap, track(xhat, no_offset));
    report.orthogonal_value_gap = std::max(report.orthogonal_value_gap, track(xhat, v));
  }
  const Vector origin = Vector::Zero(d);
  for (Index j = 0; j < perp.cols(); ++j) {
    const Vector v = report.scale * perp.col(j);
    report.axis_orthogonal_gap = std::max(report.axis_orthogonal_gap, track(origin, v));
  }
  return report;
}

ConversionReport compare_models(const ModelResult& full, const ModelResult& sub,
                                const SubspaceFrame& frame, Index probes,
                                std::uint64_t seed, std::optional<double> scale) {
  ConversionReport report = coincidence_check(full.model, sub.model, frame, probes, seed, scale);
  report.gradient_gap = (full.model.gradient - lift_gradient(sub.model.gradient, frame)).norm();

  Matrix lifted;
  Matrix full_h = full.model.hessian.matrix();
  if (full.raw_hessian && sub.raw_hessian) {
    lifted = lift_hessian(*sub.raw_hessian, frame);
    full_h = *full.raw_hessian;
  } else {
    lifted = lift_hessian(sub.model.hessian.matrix(), frame);
  }
  if (full.kind == ModelKind::LFU && full.reference_hessian) {
    lifted += lfu_correction(*full.reference_hessian, frame);
    report.correction_applied = lfu_correction_applied(*full.reference_hessian, frame);
  }
  report.hessian_gap = (full_h - lifted).norm();
  return report;
}

}  // namespace subdfo
