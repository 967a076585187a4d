#include "subdfo/interpolation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "subdfo/errors.hpp"

namespace subdfo {
namespace {

// d_i^T H d_i for every column of D.
Vector quadratic_forms(const Matrix& d, const Matrix& h) {
  return (d.array() * (h * d).array()).colwise().sum().transpose();
}

double value_scale(const SampleSet& samples) {
  return std::max(1.0, samples.values().cwiseAbs().maxCoeff());
}

struct MfnSolution {
  SymMatrix hessian;
  Vector canonical;
  Matrix ambiguity;
  double residual = 0.0;  // max-abs constraint violation
};

// Stationarity of the Lagrangian gives H = sum_i lambda_i d_i d_i^T / 2 and
// D lambda = 0; substituting into the constraints yields the symmetric KKT
// system
//   [ A/4  D^T ] [lambda]   [delta]
//   [ D    0   ] [alpha ] = [  0  ],   A_ij = (d_i^T d_j)^2.
// The system is singular whenever rank(D) < n; the pseudoinverse then picks
// the minimum-norm multipliers, which still produce the unique Hessian.
MfnSolution solve_mfn(const Matrix& d, const Vector& delta, const FitOptions& options) {
  const Index n = d.rows();
  const Index m = d.cols();
  const Matrix gram = d.transpose() * d;

  Matrix kkt = Matrix::Zero(m + n, m + n);
  kkt.topLeftCorner(m, m) = 0.25 * gram.cwiseProduct(gram);
  kkt.topRightCorner(m, n) = d.transpose();
  kkt.bottomLeftCorner(n, m) = d;
  Vector rhs = Vector::Zero(m + n);
  rhs.head(m) = delta;

  Vector z;
  const double tol = options.rank_tol.value_or(default_rank_tol(m + n, m + n));
  Eigen::FullPivLU<Matrix> lu(kkt);
  lu.setThreshold(tol);
  if (lu.rank() == m + n) {
    z = lu.solve(rhs);
  } else {
    z = minnorm_solve(kkt, rhs, options.rank_tol);
  }
  const Vector lambda = z.head(m);

  MfnSolution out;
  out.hessian = SymMatrix::symmetric_part(0.5 * d * lambda.asDiagonal() * d.transpose());

  // With H fixed, the admissible gradients solve D^T alpha = rhs_alpha; the
  // canonical member is the minimum-norm one and the rest differ by null(D^T).
  const Vector rhs_alpha = delta - 0.5 * quadratic_forms(d, out.hessian.matrix());
  LeastSquaresSolution ls = minnorm_lstsq(d.transpose(), rhs_alpha, options.rank_tol);
  out.canonical = std::move(ls.x);
  out.ambiguity = std::move(ls.nullspace);
  out.residual = m == 0 ? 0.0
                        : (d.transpose() * out.canonical - rhs_alpha).cwiseAbs().maxCoeff();
  return out;
}

QuadraticModel make_model(const SampleSet& samples, Vector gradient, SymMatrix hessian) {
  return QuadraticModel{samples.base(), samples.base_value(), std::move(gradient),
                        std::move(hessian)};
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::DQI: return "dqi";
    case ModelKind::MN: return "mn";
    case ModelKind::MFN: return "mfn";
    case ModelKind::LFU: return "lfu";
    case ModelKind::QGSD: return "qgsd";
  }
  return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "dqi") return ModelKind::DQI;
  if (lower == "mn") return ModelKind::MN;
  if (lower == "mfn") return ModelKind::MFN;
  if (lower == "lfu") return ModelKind::LFU;
  if (lower == "qgsd") return ModelKind::QGSD;
  throw Error(ErrorKind::InvalidArgument, "unknown model kind '" + std::string(name) + "'");
}

double QuadraticModel::evaluate(const Vector& x) const {
  if (x.size() != dim()) {
    throw Error(ErrorKind::DimensionMismatch, "evaluation point has wrong dimension");
  }
  const Vector s = x - base;
  return constant + gradient.dot(s) + 0.5 * s.dot(hessian.matrix() * s);
}

double evaluate(const QuadraticModel& model, const Vector& x) { return model.evaluate(x); }

Vector GradientFamily::member(const Vector& coeffs) const {
  if (coeffs.size() != ambiguity_basis.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected " + std::to_string(ambiguity_basis.cols()) + " coefficients");
  }
  if (coeffs.size() == 0) return canonical;
  return canonical + ambiguity_basis * coeffs;
}

double GradientFamily::distance(const Vector& g) const {
  if (g.size() != canonical.size()) {
    throw Error(ErrorKind::DimensionMismatch, "gradient has wrong dimension");
  }
  Vector r = g - canonical;
  if (ambiguity_basis.cols() > 0) r -= ambiguity_basis * (ambiguity_basis.transpose() * r);
  return r.norm();
}

Vector member(const GradientFamily& family, const Vector& coeffs) {
  return family.member(coeffs);
}

QuadraticModel ModelResult::with_gradient(const Vector& g) const {
  if (g.size() != model.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "gradient has wrong dimension");
  }
  QuadraticModel out = model;
  out.gradient = g;
  return out;
}

double interpolation_residual(const QuadraticModel& model, const SampleSet& samples) {
  if (model.dim() != samples.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "model and sample set dimensions differ");
  }
  double worst = std::abs(model.evaluate(samples.base()) - samples.base_value());
  for (Index i = 0; i < samples.size(); ++i) {
    worst = std::max(worst, std::abs(model.evaluate(samples.point(i)) - samples.values()(i + 1)));
  }
  return worst;
}

ModelResult fit_dqi(const SampleSet& samples, const FitOptions& options) {
  const Index n = samples.dim();
  if (!poised_for_quadratic(samples, options.rank_tol)) {
    throw Error(ErrorKind::NotPoised,
                "sample set with " + std::to_string(samples.size() + 1) +
                    " points is not poised for quadratic interpolation in R^" +
                    std::to_string(n));
  }
  const Matrix a = quadratic_constraint_matrix(samples.displacements());
  const Vector z = a.fullPivLu().solve(samples.value_differences());

  Vector gradient = z.head(n);
  SymMatrix hessian = smat(SVecCoords{n, z.tail(svec_length(n))});
  ModelResult out;
  out.model = make_model(samples, gradient, std::move(hessian));
  out.gradients = GradientFamily{std::move(gradient), Matrix(n, 0)};
  out.kind = ModelKind::DQI;
  return out;
}

ModelResult fit_mn(const SampleSet& samples, const FitOptions& options) {
  const Index n = samples.dim();
  const Matrix a = quadratic_constraint_matrix(samples.displacements());
  const Vector delta = samples.value_differences();
  const Vector z = minnorm_solve(a, delta, options.rank_tol);
  const double residual = samples.size() == 0 ? 0.0 : (a * z - delta).cwiseAbs().maxCoeff();
  if (residual > options.feasibility_tol * value_scale(samples)) {
    throw Error(ErrorKind::Infeasible,
                "no quadratic interpolates the data; residual " + std::to_string(residual),
                residual);
  }

  Vector gradient = z.head(n);
  SymMatrix hessian = smat(SVecCoords{n, z.tail(svec_length(n))});
  ModelResult out;
  out.model = make_model(samples, gradient, std::move(hessian));
  out.gradients = GradientFamily{std::move(gradient), Matrix(n, 0)};
  out.kind = ModelKind::MN;
  return out;
}

ModelResult fit_mfn(const SampleSet& samples, const FitOptions& options) {
  MfnSolution sol = solve_mfn(samples.displacements(), samples.value_differences(), options);
  if (sol.residual > options.feasibility_tol * value_scale(samples)) {
    throw Error(ErrorKind::Infeasible,
                "no quadratic interpolates the data; residual " + std::to_string(sol.residual),
                sol.residual);
  }
  ModelResult out;
  out.model = make_model(samples, sol.canonical, std::move(sol.hessian));
  out.gradients = GradientFamily{std::move(sol.canonical), std::move(sol.ambiguity)};
  out.kind = ModelKind::MFN;
  return out;
}

ModelResult fit_lfu(const SampleSet& samples, const SymMatrix& href,
                    const FitOptions& options) {
  if (href.order() != samples.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "reference Hessian has order " + std::to_string(href.order()) +
                    ", expected " + std::to_string(samples.dim()));
  }
  const Matrix& d = samples.displacements();
  // With H = href + dH the constraints become
  // d^T alpha + d^T dH d / 2 = delta - d^T href d / 2.
  const Vector shifted = samples.value_differences() - 0.5 * quadratic_forms(d, href.matrix());
  MfnSolution sol = solve_mfn(d, shifted, options);
  if (sol.residual > options.feasibility_tol * value_scale(samples)) {
    throw Error(ErrorKind::Infeasible,
                "no quadratic interpolates the data; residual " + std::to_string(sol.residual),
                sol.residual);
  }
  ModelResult out;
  out.model = make_model(samples, sol.canonical,
                         SymMatrix::symmetric_part(href.matrix() + sol.hessian.matrix()));
  out.gradients = GradientFamily{std::move(sol.canonical), std::move(sol.ambiguity)};
  out.kind = ModelKind::LFU;
  out.reference_hessian = href;
  return out;
}

}  // namespace subdfo
