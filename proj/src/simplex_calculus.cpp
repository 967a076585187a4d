#include "subdfo/simplex_calculus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "subdfo/errors.hpp"

namespace subdfo {
namespace {

std::vector<double> key_of(const Vector& v) { return {v.data(), v.data() + v.size()}; }

void require_nonzero_columns(const Matrix& a, std::string_view what) {
  for (Index j = 0; j < a.cols(); ++j) {
    if (a.col(j).isZero(0.0)) {
      throw Error(ErrorKind::InvalidArgument,
                  std::string(what) + " column " + std::to_string(j) + " is zero");
    }
  }
}

}  // namespace

DirectionBundle::DirectionBundle(Matrix s, std::vector<Matrix> t, bool shared)
    : s_(std::move(s)), t_(std::move(t)), shared_(shared) {
  if (s_.cols() < 1) throw Error(ErrorKind::InvalidArgument, "S needs at least one column");
  require_finite(s_, "S");
  require_nonzero_columns(s_, "S");
  for (const Matrix& t_i : t_) {
    if (t_i.rows() != s_.rows()) {
      throw Error(ErrorKind::DimensionMismatch, "T blocks must have as many rows as S");
    }
    if (t_i.cols() < 1) throw Error(ErrorKind::InvalidArgument, "T blocks need a column");
    require_finite(t_i, "T");
    require_nonzero_columns(t_i, "T");
  }
}

DirectionBundle DirectionBundle::shared(Matrix s, Matrix t) {
  std::vector<Matrix> list;
  list.push_back(std::move(t));
  return DirectionBundle(std::move(s), std::move(list), true);
}

DirectionBundle DirectionBundle::per_direction(Matrix s, std::vector<Matrix> t_list) {
  if (static_cast<Index>(t_list.size()) != s.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "T_list needs one block per column of S (" + std::to_string(s.cols()) + ")");
  }
  return DirectionBundle(std::move(s), std::move(t_list), false);
}

const Matrix& DirectionBundle::t(Index i) const {
  if (i < 0 || i >= size()) throw Error(ErrorKind::InvalidArgument, "direction index");
  return shared_ ? t_.front() : t_[static_cast<std::size_t>(i)];
}

StencilEvaluations::StencilEvaluations(Vector base, FunctionOracle f)
    : base_(std::move(base)), f_(std::move(f)) {
  if (base_.size() != f_.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "base point and oracle dimensions differ");
  }
  require_finite(base_, "base point");
}

double StencilEvaluations::at(const Vector& displacement) {
  if (displacement.size() != base_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "stencil displacement has wrong dimension");
  }
  auto key = key_of(displacement);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const double value = f_(base_ + displacement);
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::NonFinite, "function value is NaN or Inf");
  }
  cache_.emplace(std::move(key), value);
  return value;
}

SampleSet StencilEvaluations::consumed() const {
  const Index n = base_.size();
  const std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
  std::vector<const std::pair<const std::vector<double>, double>*> others;
  double f0 = std::numeric_limits<double>::quiet_NaN();
  for (const auto& entry : cache_) {
    if (entry.first == zero) {
      f0 = entry.second;
    } else {
      others.push_back(&entry);
    }
  }
  if (std::isnan(f0)) {
    throw Error(ErrorKind::InvalidArgument, "the base point has not been evaluated");
  }
  Matrix d(n, static_cast<Index>(others.size()));
  Vector values(static_cast<Index>(others.size()) + 1);
  values(0) = f0;
  for (Index j = 0; j < d.cols(); ++j) {
    const auto& entry = *others[static_cast<std::size_t>(j)];
    d.col(j) = Eigen::Map<const Vector>(entry.first.data(), n);
    values(j + 1) = entry.second;
  }
  return SampleSet(base_, std::move(d), std::move(values), DuplicatePolicy::Keep);
}

Vector gsg(StencilEvaluations& evals, const Vector& shift, const Matrix& s,
           std::optional<double> rank_tol) {
  if (s.rows() != evals.base().size() || shift.size() != s.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "direction matrix has wrong dimension");
  }
  const double center = evals.at(shift);
  Vector delta(s.cols());
  for (Index j = 0; j < s.cols(); ++j) {
    const Vector disp = shift + s.col(j);
    delta(j) = evals.at(disp) - center;
  }
  return transpose_pinv_apply(s, delta, rank_tol);
}

Vector gsg(const Vector& x0, const Matrix& s, const FunctionOracle& f,
           std::optional<double> rank_tol) {
  if (s.cols() < 1) throw Error(ErrorKind::InvalidArgument, "S needs at least one column");
  require_finite(s, "S");
  StencilEvaluations evals(x0, f);
  return gsg(evals, Vector::Zero(x0.size()), s, rank_tol);
}

Matrix gsh(StencilEvaluations& evals, const DirectionBundle& bundle,
           std::optional<double> rank_tol) {
  const Index n = bundle.dim();
  if (n != evals.base().size()) {
    throw Error(ErrorKind::DimensionMismatch, "bundle dimension differs from the base point");
  }
  const Vector origin = Vector::Zero(n);
  const Matrix& s = bundle.s();
  Matrix second(bundle.size(), n);
  for (Index i = 0; i < bundle.size(); ++i) {
    const Matrix& t = bundle.t(i);
    const Vector shifted = gsg(evals, s.col(i), t, rank_tol);
    const Vector centered = gsg(evals, origin, t, rank_tol);
    second.row(i) = (shifted - centered).transpose();
  }
  // (S^T)^dagger applied column by column to delta^2.
  Matrix out(n, n);
  for (Index c = 0; c < n; ++c) out.col(c) = transpose_pinv_apply(s, second.col(c), rank_tol);
  return out;
}

Matrix gsh(const Vector& x0, const DirectionBundle& bundle, const FunctionOracle& f,
           std::optional<double> rank_tol) {
  StencilEvaluations evals(x0, f);
  return gsh(evals, bundle, rank_tol);
}

SymMatrix symmetrize(const Matrix& h_raw) { return SymMatrix::symmetric_part(h_raw); }

std::string_view to_string(QgsdVariant variant) {
  return variant == QgsdVariant::Simple ? "simple" : "refined";
}

QgsdVariant qgsd_variant_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "simple") return QgsdVariant::Simple;
  if (lower == "refined") return QgsdVariant::Refined;
  throw Error(ErrorKind::InvalidArgument, "unknown QGSD variant '" + std::string(name) + "'");
}

ModelResult fit_qgsd(const Vector& x0, const DirectionBundle& bundle, const FunctionOracle& f,
                     QgsdVariant variant, bool symmetrize_hessian,
                     std::optional<double> rank_tol) {
  const Index n = bundle.dim();
  if (x0.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "base point and bundle dimensions differ");
  }
  const Matrix& s = bundle.s();
  if (variant == QgsdVariant::Refined) {
    const Matrix& t = bundle.t(0);
    const bool same = bundle.is_shared() && t.rows() == s.rows() && t.cols() == s.cols() &&
                      (t - s).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, s.cwiseAbs().maxCoeff());
    if (!same) {
      throw Error(ErrorKind::VariantPreconditionViolated,
                  "the refined QGSD model requires a shared T equal to S");
    }
  }

  StencilEvaluations evals(x0, f);
  const Vector origin = Vector::Zero(n);
  Vector g = gsg(evals, origin, s, rank_tol);
  if (variant == QgsdVariant::Refined) {
    const Matrix doubled = 2.0 * s;
    g = 2.0 * g - gsg(evals, origin, doubled, rank_tol);
  }
  Matrix h_raw = gsh(evals, bundle, rank_tol);

  ModelResult out;
  out.model = QuadraticModel{x0, evals.base_value(), g, symmetrize(h_raw)};
  out.gradients = GradientFamily{std::move(g), Matrix(n, 0)};
  out.kind = ModelKind::QGSD;
  if (!symmetrize_hessian) out.raw_hessian = std::move(h_raw);
  out.consumed = evals.consumed();
  return out;
}

std::vector<Vector> qgsd_displacements(const DirectionBundle& bundle) {
  const Index n = bundle.dim();
  std::map<std::vector<double>, Vector> unique;
  auto add = [&](const Vector& v) { unique.emplace(key_of(v), v); };
  add(Vector::Zero(n));
  for (Index i = 0; i < bundle.size(); ++i) {
    const Vector si = bundle.s().col(i);
    add(si);
    const Matrix& t = bundle.t(i);
    for (Index j = 0; j < t.cols(); ++j) {
      add(t.col(j));
      add(Vector(si + t.col(j)));
    }
  }
  std::vector<Vector> out;
  out.reserve(unique.size());
  for (auto& entry : unique) out.push_back(std::move(entry.second));
  return out;
}

}  // namespace subdfo
