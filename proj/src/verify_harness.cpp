#include "subdfo/verify_harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "subdfo/errors.hpp"
#include "subdfo/interpolation.hpp"
#include "subdfo/simplex_calculus.hpp"
#include "subdfo/subspace_bridge.hpp"

namespace subdfo {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxRedraws = 500;
// Hatted constraint matrices above this condition number are redrawn.
constexpr double kConstraintConditionCap = 1e6;
// Same for direction matrices, measured over their nonzero singular values.
constexpr double kDirectionConditionCap = 1e3;
// Relative rank cut for simplex suites, whose direction matrices may be
// built rank-deficient on purpose.
constexpr double kSimplexRankTol = 1e-10;

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Index uniform_index(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

Matrix gaussian_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) a(i, j) = normal(rng);
  }
  return a;
}

Vector gaussian_vector(Rng& rng, Index n) { return gaussian_matrix(rng, n, 1).col(0); }

SymMatrix random_symmetric(Rng& rng, Index n) {
  const Matrix g = gaussian_matrix(rng, n, n);
  return SymMatrix::symmetric_part(g / std::sqrt(static_cast<double>(n)));
}

double rel_gap(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

double value_scale(const SampleSet& y) { return std::max(1.0, y.values().cwiseAbs().maxCoeff()); }

Matrix random_basis(Rng& rng, Index n, Index d) {
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    OrthonormalFactor f = orthonormal_columns(gaussian_matrix(rng, n, d));
    if (f.rank == d) return f.q;
  }
  throw Error(ErrorKind::SpecInfeasible, "could not draw a full-rank basis");
}

double constraint_condition(const Matrix& hatted) {
  const Matrix c = quadratic_constraint_matrix(hatted);
  Eigen::JacobiSVD<Matrix> svd(c);
  const Vector& s = svd.singularValues();
  const Index m = hatted.cols();
  if (s.size() < m || s(m - 1) <= 0.0) return kInf;
  return s(0) / s(m - 1);
}

// d x p directions, rank-deficient with probability 1/3, with nonzero
// columns and bounded condition number over the nonzero spectrum.
Matrix random_directions(Rng& rng, Index d, Index p) {
  std::bernoulli_distribution deficient(1.0 / 3.0);
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    Matrix s;
    if (deficient(rng) && std::min(d, p) > 1) {
      const Index r = uniform_index(rng, 1, std::min(d, p) - 1);
      s = gaussian_matrix(rng, d, r) * gaussian_matrix(rng, r, p) / std::sqrt(static_cast<double>(r));
    } else {
      s = gaussian_matrix(rng, d, p);
    }
    const double min_col = s.colwise().norm().minCoeff();
    if (min_col < 1e-2) continue;
    if (effective_condition(s, kSimplexRankTol) > kDirectionConditionCap) continue;
    return s;
  }
  throw Error(ErrorKind::SpecInfeasible, "could not draw well-conditioned directions");
}

FunctionClass class_for_trial(Index trial) {
  static constexpr FunctionClass kCycle[] = {FunctionClass::Quadratic,
                                             FunctionClass::TrigPolynomial, FunctionClass::Cubic};
  return kCycle[trial % 3];
}

struct Dims {
  Index n;
  Index d;
};

Dims draw_dims(Rng& rng, const DimensionRange& dims, Index d_min = 1) {
  const Index n = uniform_index(rng, dims.n_min, dims.n_max);
  const Index d_hi = std::max(d_min, std::min(n - 1, dims.d_max));
  return {n, uniform_index(rng, d_min, d_hi)};
}

Index max_feasible_m(Index d) { return d * (d + 3) / 2; }

void finalize(TrialRecord& r, double tol) {
  double worst = 0.0;
  for (double g : {r.gradient_gap, r.hessian_gap, r.family_gap, r.interpolation_gap,
                   r.subspace_value_gap, r.orthogonal_value_gap}) {
    if (std::isnan(g)) continue;
    worst = std::max(worst, g);
  }
  r.max_gap = worst;
  r.passed = worst <= tol;
}

TrialRecord blank_record(Index trial, const Instance* inst = nullptr) {
  TrialRecord r;
  r.trial = trial;
  r.gradient_gap = r.hessian_gap = r.family_gap = r.interpolation_gap = kNaN;
  r.subspace_value_gap = r.orthogonal_value_gap = kNaN;
  if (inst) {
    r.n = inst->frame.ambient();
    r.d = inst->frame.dim();
    r.m = inst->samples.size();
    r.function_class = inst->function.name;
  }
  return r;
}

double normalized_subspace(const ConversionReport& rep) {
  return rep.subspace_value_gap / rep.value_scale;
}

double normalized_orthogonal(const ConversionReport& rep) {
  return std::max(rep.orthogonal_value_gap, rep.axis_orthogonal_gap) / rep.value_scale;
}

struct TrialContext {
  Index trial;
  std::uint64_t seed;
  const DimensionRange& dims;
  double tol;
  Index probes;
};

Instance instance_for(Rng& rng, const TrialContext& ctx, bool determined) {
  const Dims nd = draw_dims(rng, ctx.dims);
  const Index m = determined ? max_feasible_m(nd.d) : uniform_index(rng, 1, max_feasible_m(nd.d));
  return random_instance({nd.n, nd.d, m, class_for_trial(ctx.trial), rng()});
}

// --- MN and the determined-case corollary --------------------------------

TrialRecord mn_trial(const TrialContext& ctx, bool determined) {
  Rng rng(ctx.seed);
  const Instance inst = instance_for(rng, ctx, determined);
  TrialRecord r = blank_record(ctx.trial, &inst);
  r.label = determined ? "dqi-subspace-vs-mn-full" : "mn";

  const SampleSet yhat = hat_sampleset(inst.samples, inst.frame);
  const ModelResult full = fit_mn(inst.samples);
  const ModelResult sub = determined ? fit_dqi(yhat) : fit_mn(yhat);
  const ModelResult lifted = lift_mn(sub, inst.frame);

  r.gradient_gap = rel_gap(lifted.model.gradient, full.model.gradient);
  r.hessian_gap = rel_gap(lifted.model.hessian.matrix(), full.model.hessian.matrix());
  r.interpolation_gap = std::max(interpolation_residual(full.model, inst.samples),
                                 interpolation_residual(sub.model, yhat)) /
                        value_scale(inst.samples);
  const ConversionReport rep = coincidence_check(full.model, sub.model, inst.frame, ctx.probes, rng());
  r.subspace_value_gap = normalized_subspace(rep);
  r.orthogonal_value_gap = normalized_orthogonal(rep);
  finalize(r, ctx.tol);
  return r;
}

// --- MFN and LFU -----------------------------------------------------------

// Membership both ways between the full family G and Q G_sub + col(Q)^perp,
// on kFamilyMembers random members per side. Also checks that swapping in
// any of those members keeps interpolation and, for pairs differing by a
// col(Q)^perp vector, coincidence on the subspace.
struct FamilyCheck {
  double family_gap = 0.0;
  double interpolation_gap = 0.0;
  double subspace_gap = 0.0;
};

FamilyCheck check_families(Rng& rng, const ModelResult& full, const ModelResult& sub,
                           const ModelResult& lifted, const Instance& inst,
                           const SampleSet& yhat) {
  FamilyCheck out;
  const SubspaceFrame& frame = inst.frame;
  const Matrix& perp = frame.basis().complement();
  const double fscale = value_scale(inst.samples);
  if (full.gradients.freedom() != lifted.gradients.freedom()) {
    out.family_gap = kInf;
    return out;
  }
  const double gscale = std::max(1.0, full.gradients.canonical.norm());
  for (Index k = 0; k < kFamilyMembers; ++k) {
    // Full-space member lies in the lifted family.
    const Vector c = gscale * gaussian_vector(rng, full.gradients.freedom());
    const Vector g = full.gradients.member(c);
    out.family_gap = std::max(out.family_gap, lifted.gradients.distance(g) / std::max(1.0, g.norm()));
    out.interpolation_gap = std::max(
        out.interpolation_gap, interpolation_residual(full.with_gradient(g), inst.samples) / fscale);

    // Lifted subspace member plus a col(Q)^perp vector lies in the full family.
    const Vector chat = gscale * gaussian_vector(rng, sub.gradients.freedom());
    const Vector ghat = sub.gradients.member(chat);
    const Vector w = perp.cols() > 0 ? Vector(perp * (gscale * gaussian_vector(rng, perp.cols())))
                                     : Vector(Vector::Zero(frame.ambient()));
    const Vector g2 = frame.q() * ghat + w;
    out.family_gap = std::max(out.family_gap, full.gradients.distance(g2) / std::max(1.0, g2.norm()));
    out.interpolation_gap =
        std::max({out.interpolation_gap,
                  interpolation_residual(full.with_gradient(g2), inst.samples) / fscale,
                  interpolation_residual(sub.with_gradient(ghat), yhat) / fscale});
    const ConversionReport rep = coincidence_check(full.with_gradient(g2), sub.with_gradient(ghat),
                                                   frame, 2, rng());
    out.subspace_gap = std::max(out.subspace_gap, normalized_subspace(rep));
  }
  return out;
}

TrialRecord mfn_trial(const TrialContext& ctx) {
  Rng rng(ctx.seed);
  const Instance inst = instance_for(rng, ctx, false);
  TrialRecord r = blank_record(ctx.trial, &inst);
  r.label = "mfn";

  const SampleSet yhat = hat_sampleset(inst.samples, inst.frame);
  const ModelResult full = fit_mfn(inst.samples);
  const ModelResult sub = fit_mfn(yhat);
  const ModelResult lifted = lift_mfn(sub, inst.frame);

  r.gradient_gap = rel_gap(lifted.gradients.canonical, full.gradients.canonical);
  r.hessian_gap = rel_gap(lifted.model.hessian.matrix(), full.model.hessian.matrix());
  const FamilyCheck fam = check_families(rng, full, sub, lifted, inst, yhat);
  r.family_gap = fam.family_gap;
  r.interpolation_gap = fam.interpolation_gap;
  const ConversionReport rep = coincidence_check(full.model, sub.model, inst.frame, ctx.probes, rng());
  r.subspace_value_gap = std::max(normalized_subspace(rep), fam.subspace_gap);
  r.orthogonal_value_gap = normalized_orthogonal(rep);
  finalize(r, ctx.tol);
  return r;
}

// n = 3, f = ||x||^2, Y = {0, e1, e2, e1 + e2}, Q spanning {e1, e2}.
Instance small_lfu_instance() {
  TestFunction f = make_named_function("sphere", 3);
  Matrix d(3, 3);
  d << 1, 0, 1,
       0, 1, 1,
       0, 0, 0;
  Vector values(4);
  for (Index i = 0; i < 4; ++i) {
    values(i) = f.oracle(i == 0 ? Vector(Vector::Zero(3)) : Vector(d.col(i - 1)));
  }
  SampleSet y(Vector::Zero(3), d, values);
  SubspaceFrame frame = detect_subspace(y);
  return Instance{std::move(f), std::move(y), std::move(frame)};
}

TrialRecord lfu_trial(const TrialContext& ctx) {
  Rng rng(ctx.seed);
  const bool fixed = ctx.trial == 0;
  const Instance inst = fixed ? small_lfu_instance() : instance_for(rng, ctx, false);
  TrialRecord r = blank_record(ctx.trial, &inst);
  r.label = fixed ? "lfu-fixed-example" : "lfu";
  const SubspaceFrame& frame = inst.frame;
  const Index n = frame.ambient();
  const SymMatrix href = fixed ? SymMatrix::identity(3) : random_symmetric(rng, n);
  const SymMatrix href_sub = SymMatrix::symmetric_part(restrict_hessian(href.matrix(), frame));

  const SampleSet yhat = hat_sampleset(inst.samples, frame);
  const ModelResult full = fit_lfu(inst.samples, href);
  const ModelResult sub = fit_lfu(yhat, href_sub);
  const ModelResult lifted = lift_lfu(sub, frame, href);

  r.gradient_gap = rel_gap(lifted.gradients.canonical, full.gradients.canonical);
  r.hessian_gap = std::max(
      rel_gap(lifted.model.hessian.matrix(), full.model.hessian.matrix()),
      rel_gap(restrict_hessian(full.model.hessian.matrix(), frame), sub.model.hessian.matrix()));
  if (fixed) {
    Vector expected_g(3);
    expected_g << 0.5, 0.5, 0.0;
    Vector e3 = Vector::Zero(3);
    e3(2) = 1.0;
    r.gradient_gap = std::max(r.gradient_gap, (full.gradients.canonical - expected_g).norm());
    r.hessian_gap = std::max(r.hessian_gap, (full.model.hessian.matrix() - Matrix::Identity(3, 3)).norm());
    // The family is exactly {(1/2, 1/2, r)}: one free direction, along e3.
    const double span_gap = full.gradients.freedom() == 1
                                ? full.gradients.distance(expected_g + 7.0 * e3)
                                : kInf;
    r.family_gap = span_gap;
  }
  const FamilyCheck fam = check_families(rng, full, sub, lifted, inst, yhat);
  r.family_gap = std::isnan(r.family_gap) ? fam.family_gap : std::max(r.family_gap, fam.family_gap);
  r.interpolation_gap = fam.interpolation_gap;

  const ConversionReport rep = coincidence_check(full.model, sub.model, frame, ctx.probes, rng());
  r.subspace_value_gap = std::max(normalized_subspace(rep), fam.subspace_gap);

  // Off the subspace the models agree only for references supported on
  // col(Q); check that case with Hbar = Q M Q^T.
  const Matrix& q = frame.q();
  const SymMatrix m_sub = random_symmetric(rng, frame.dim());
  const SymMatrix supported = SymMatrix::symmetric_part(q * m_sub.matrix() * q.transpose());
  const ModelResult full_s = fit_lfu(inst.samples, supported);
  const ModelResult sub_s =
      fit_lfu(yhat, SymMatrix::symmetric_part(restrict_hessian(supported.matrix(), frame)));
  const ConversionReport rep_s = coincidence_check(full_s.model, sub_s.model, frame, ctx.probes, rng());
  r.subspace_value_gap = std::max(r.subspace_value_gap, normalized_subspace(rep_s));
  r.orthogonal_value_gap = normalized_orthogonal(rep_s);
  finalize(r, ctx.tol);
  return r;
}

// --- simplex derivatives ---------------------------------------------------

struct SimplexSetup {
  Instance base;  // only frame and function are used
  FunctionOracle fhat;
  DirectionBundle bundle;      // full space
  DirectionBundle bundle_hat;  // subspace coordinates
  bool s_full_column_rank;
};

SimplexSetup simplex_setup(Rng& rng, const TrialContext& ctx, bool shared_t_equals_s) {
  const Dims nd = draw_dims(rng, ctx.dims);
  Instance inst = random_instance({nd.n, nd.d, 1, class_for_trial(ctx.trial), rng()});
  const Index d = nd.d;
  const Matrix& q = inst.frame.q();
  const Matrix s_hat = random_directions(rng, d, uniform_index(rng, 1, 2 * d));
  DirectionBundle bundle = [&] {
    if (shared_t_equals_s) return DirectionBundle::shared(q * s_hat, q * s_hat);
    if (std::bernoulli_distribution(0.5)(rng)) {
      return DirectionBundle::shared(q * s_hat, q * random_directions(rng, d, uniform_index(rng, 1, 2 * d)));
    }
    std::vector<Matrix> t_list;
    for (Index i = 0; i < s_hat.cols(); ++i) {
      t_list.push_back(q * random_directions(rng, d, uniform_index(rng, 1, 2 * d)));
    }
    return DirectionBundle::per_direction(q * s_hat, std::move(t_list));
  }();
  DirectionBundle bundle_hat = hat_bundle(bundle, inst.frame);
  FunctionOracle fhat = hat_function(inst.function.oracle, inst.frame);
  const bool fcr = numerical_rank(s_hat, kSimplexRankTol) == s_hat.cols();
  return SimplexSetup{std::move(inst), std::move(fhat), std::move(bundle), std::move(bundle_hat), fcr};
}

TrialRecord simplex_record(const TrialContext& ctx, const SimplexSetup& setup, const char* label) {
  TrialRecord r = blank_record(ctx.trial);
  r.label = label;
  r.n = setup.base.frame.ambient();
  r.d = setup.base.frame.dim();
  r.m = setup.bundle.size();
  r.function_class = setup.base.function.name;
  return r;
}

TrialRecord gsg_trial(const TrialContext& ctx) {
  Rng rng(ctx.seed);
  const SimplexSetup st = simplex_setup(rng, ctx, false);
  TrialRecord r = simplex_record(ctx, st, "gsg");
  const SubspaceFrame& frame = st.base.frame;
  const Vector full = gsg(frame.base(), st.bundle.s(), st.base.function.oracle, kSimplexRankTol);
  const Vector sub = gsg(Vector::Zero(frame.dim()), st.bundle_hat.s(), st.fhat, kSimplexRankTol);
  r.gradient_gap = rel_gap(lift_gradient(sub, frame), full);
  finalize(r, ctx.tol);
  return r;
}

TrialRecord gsh_trial(const TrialContext& ctx) {
  Rng rng(ctx.seed);
  const SimplexSetup st = simplex_setup(rng, ctx, false);
  TrialRecord r = simplex_record(ctx, st, st.bundle.is_shared() ? "gsh-shared-t" : "gsh-per-direction-t");
  const SubspaceFrame& frame = st.base.frame;
  const Matrix full = gsh(frame.base(), st.bundle, st.base.function.oracle, kSimplexRankTol);
  const Matrix sub = gsh(Vector::Zero(frame.dim()), st.bundle_hat, st.fhat, kSimplexRankTol);
  r.hessian_gap = rel_gap(lift_hessian(sub, frame), full);
  finalize(r, ctx.tol);
  return r;
}

TrialRecord qgsd_trial(const TrialContext& ctx, QgsdVariant variant) {
  Rng rng(ctx.seed);
  const bool refined = variant == QgsdVariant::Refined;
  const SimplexSetup st = simplex_setup(rng, ctx, refined);
  TrialRecord r = simplex_record(ctx, st, refined ? "qgsd-refined" : "qgsd-simple");
  const SubspaceFrame& frame = st.base.frame;
  const ModelResult full =
      fit_qgsd(frame.base(), st.bundle, st.base.function.oracle, variant, false, kSimplexRankTol);
  const ModelResult sub =
      fit_qgsd(Vector::Zero(frame.dim()), st.bundle_hat, st.fhat, variant, false, kSimplexRankTol);
  const ConversionReport rep = compare_models(full, sub, frame, ctx.probes, rng());
  r.gradient_gap = rep.gradient_gap / std::max(1.0, full.model.gradient.norm());
  r.hessian_gap = rep.hessian_gap / std::max(1.0, full.raw_hessian->norm());
  r.subspace_value_gap = normalized_subspace(rep);
  r.orthogonal_value_gap = normalized_orthogonal(rep);

  // The evaluated points are exactly the stencil's point union.
  const std::size_t expected = qgsd_displacements(st.bundle).size();
  r.family_gap = static_cast<std::size_t>(full.consumed->size()) + 1 == expected ? 0.0 : kInf;
  if (refined && st.s_full_column_rank) {
    r.interpolation_gap =
        interpolation_residual(full.model, *full.consumed) / value_scale(*full.consumed);
  }
  finalize(r, ctx.tol);
  return r;
}

TrialRecord run_trial(TheoremId theorem, const TrialContext& ctx) {
  switch (theorem) {
    case TheoremId::MN: return mn_trial(ctx, false);
    case TheoremId::DQICorollary: return mn_trial(ctx, true);
    case TheoremId::MFN: return mfn_trial(ctx);
    case TheoremId::LFU: return lfu_trial(ctx);
    case TheoremId::GSG: return gsg_trial(ctx);
    case TheoremId::GSH: return gsh_trial(ctx);
    case TheoremId::QGSDSimple: return qgsd_trial(ctx, QgsdVariant::Simple);
    case TheoremId::QGSDRefined: return qgsd_trial(ctx, QgsdVariant::Refined);
    case TheoremId::NegativeControls: break;
  }
  throw Error(ErrorKind::UnknownTheorem, "no per-trial check for this suite");
}

TrialRecord error_record(Index trial, const std::exception& e) {
  TrialRecord r = blank_record(trial);
  r.label = std::string("error: ") + e.what();
  r.max_gap = kInf;
  r.passed = false;
  return r;
}

void tally(TheoremSuiteResult& result, TrialRecord record) {
  if (!record.passed) ++result.failures;
  result.max_gap = std::max(result.max_gap, record.max_gap);
  result.records.push_back(std::move(record));
}

std::string format_gap(double g) {
  if (std::isnan(g)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << g;
  return os.str();
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(seed ^ splitmix64(trial + 0x5851f42d4c957f2dULL));
}

Instance random_instance(const InstanceSpec& spec) {
  if (spec.n < 1 || spec.d < 1 || spec.d > spec.n) {
    throw Error(ErrorKind::InvalidArgument, "instance needs 1 <= d <= n");
  }
  if (spec.m < 1) throw Error(ErrorKind::InvalidArgument, "instance needs m >= 1");
  if (spec.m > max_feasible_m(spec.d)) {
    throw Error(ErrorKind::SpecInfeasible,
                "m = " + std::to_string(spec.m) + " exceeds d(d+3)/2 = " +
                    std::to_string(max_feasible_m(spec.d)));
  }
  Rng rng(spec.seed);
  Matrix q = random_basis(rng, spec.n, spec.d);
  Vector x0 = 0.5 * gaussian_vector(rng, spec.n);
  TestFunction f = random_test_function(spec.function_class, spec.n, rng);

  Matrix hatted;
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxRedraws) {
      throw Error(ErrorKind::SpecInfeasible, "could not draw a well-conditioned sample set");
    }
    hatted = gaussian_matrix(rng, spec.d, spec.m);
    if (constraint_condition(hatted) <= kConstraintConditionCap) break;
  }
  const Matrix d = q * hatted;
  Vector values(spec.m + 1);
  values(0) = f.oracle(x0);
  for (Index i = 0; i < spec.m; ++i) values(i + 1) = f.oracle(x0 + d.col(i));

  SampleSet y(x0, d, std::move(values));
  SubspaceFrame frame(OrthonormalBasis(std::move(q)), std::move(x0), std::move(hatted));
  return Instance{std::move(f), std::move(y), std::move(frame)};
}

std::string_view to_string(TheoremId id) {
  switch (id) {
    case TheoremId::MN: return "mn";
    case TheoremId::DQICorollary: return "dqi";
    case TheoremId::MFN: return "mfn";
    case TheoremId::LFU: return "lfu";
    case TheoremId::GSG: return "gsg";
    case TheoremId::GSH: return "gsh";
    case TheoremId::QGSDSimple: return "qgsd-simple";
    case TheoremId::QGSDRefined: return "qgsd-refined";
    case TheoremId::NegativeControls: return "negative-controls";
  }
  return "unknown";
}

TheoremId theorem_from_string(std::string_view name) {
  for (TheoremId id : {TheoremId::MN, TheoremId::DQICorollary, TheoremId::MFN, TheoremId::LFU,
                       TheoremId::GSG, TheoremId::GSH, TheoremId::QGSDSimple,
                       TheoremId::QGSDRefined, TheoremId::NegativeControls}) {
    if (to_string(id) == name) return id;
  }
  throw Error(ErrorKind::UnknownTheorem, "unknown theorem '" + std::string(name) + "'");
}

std::vector<TheoremId> theorems_for_selector(std::string_view selector) {
  if (selector == "qgsd") return {TheoremId::QGSDSimple, TheoremId::QGSDRefined};
  if (selector == "all") {
    return {TheoremId::MN, TheoremId::DQICorollary, TheoremId::MFN, TheoremId::LFU,
            TheoremId::GSG, TheoremId::GSH, TheoremId::QGSDSimple, TheoremId::QGSDRefined,
            TheoremId::NegativeControls};
  }
  return {theorem_from_string(selector)};
}

TheoremSuiteResult run_suite(TheoremId theorem, Index trials, const DimensionRange& dims,
                             double tol, std::uint64_t seed, Index probes) {
  if (theorem == TheoremId::NegativeControls) return negative_controls(seed, trials, tol, probes);
  if (trials < 0) throw Error(ErrorKind::InvalidArgument, "trial count must be >= 0");
  if (dims.n_min < 2 || dims.n_max < dims.n_min || dims.d_max < 1) {
    throw Error(ErrorKind::InvalidArgument, "dimension range needs 2 <= n_min <= n_max, d_max >= 1");
  }
  TheoremSuiteResult result;
  result.theorem = theorem;
  result.trials = trials;
  result.tol = tol;
  result.seed = seed;
  for (Index t = 0; t < trials; ++t) {
    const TrialContext ctx{t, trial_seed(seed, static_cast<std::uint64_t>(t)), dims, tol, probes};
    try {
      tally(result, run_trial(theorem, ctx));
    } catch (const Error& e) {
      tally(result, error_record(t, e));
    }
  }
  return result;
}

TheoremSuiteResult negative_controls(std::uint64_t seed, Index trials, double tol, Index probes) {
  if (trials < 0) throw Error(ErrorKind::InvalidArgument, "trial count must be >= 0");
  TheoremSuiteResult result;
  result.theorem = TheoremId::NegativeControls;
  result.tol = tol;
  result.seed = seed;
  const DimensionRange dims;
  std::uint64_t stream = 0;
  auto next_seed = [&] { return trial_seed(seed, stream++); };

  // Largest gap among those that must stay small; the "must be large" gaps
  // are reported per record but do not enter result.max_gap.
  auto add = [&](TrialRecord& r, double small_gap) {
    r.max_gap = small_gap;
    if (!r.passed) ++result.failures;
    result.max_gap = std::max(result.max_gap, small_gap);
    result.records.push_back(r);
  };

  // Fixed example: the gap at x0 + e3 is exactly 1/2.
  {
    const Instance inst = small_lfu_instance();
    TrialRecord r = blank_record(0, &inst);
    r.label = "lfu-fixed-example-e3";
    const ModelResult full = fit_lfu(inst.samples, SymMatrix::identity(3));
    const SampleSet yhat = hat_sampleset(inst.samples, inst.frame);
    const ModelResult sub = fit_lfu(
        yhat, SymMatrix::symmetric_part(restrict_hessian(Matrix::Identity(3, 3), inst.frame)));
    Vector e3 = Vector::Zero(3);
    e3(2) = 1.0;
    const double gap = std::abs(probe_gap(full.model, sub.model, inst.frame, Vector::Zero(2), e3));
    const ConversionReport rep = coincidence_check(full.model, sub.model, inst.frame, probes, next_seed());
    r.subspace_value_gap = normalized_subspace(rep);
    r.orthogonal_value_gap = gap;
    r.passed = std::abs(gap - 0.5) <= 1e-10 && r.subspace_value_gap <= tol;
    add(r, r.subspace_value_gap);
  }

  // Control of the control: Hbar = Q M Q^T must coincide off the subspace.
  for (Index t = 0; t < 10; ++t) {
    Rng rng(next_seed());
    const TrialContext ctx{t, 0, dims, tol, probes};
    const Instance inst = instance_for(rng, ctx, false);
    TrialRecord r = blank_record(t, &inst);
    r.label = "lfu-supported-reference";
    const Matrix& q = inst.frame.q();
    const SymMatrix m = random_symmetric(rng, inst.frame.dim());
    const SymMatrix href = SymMatrix::symmetric_part(q * m.matrix() * q.transpose());
    const ModelResult full = fit_lfu(inst.samples, href);
    const ModelResult sub = fit_lfu(hat_sampleset(inst.samples, inst.frame),
                                    SymMatrix::symmetric_part(restrict_hessian(href.matrix(), inst.frame)));
    const ConversionReport rep = coincidence_check(full.model, sub.model, inst.frame, probes, rng());
    r.subspace_value_gap = normalized_subspace(rep);
    r.orthogonal_value_gap = normalized_orthogonal(rep);
    finalize(r, tol);
    add(r, r.max_gap);
  }

  // Random reference: coincidence on the subspace, separation off it.
  Index separated = 0;
  for (Index t = 0; t < trials; ++t) {
    Rng rng(next_seed());
    const TrialContext ctx{t, 0, dims, tol, probes};
    try {
      const Instance inst = instance_for(rng, ctx, false);
      TrialRecord r = blank_record(t, &inst);
      r.label = "lfu-random-reference";
      const SymMatrix href = random_symmetric(rng, inst.frame.ambient());
      const ModelResult full = fit_lfu(inst.samples, href);
      const ModelResult sub = fit_lfu(hat_sampleset(inst.samples, inst.frame),
                                      SymMatrix::symmetric_part(restrict_hessian(href.matrix(), inst.frame)));
      const ConversionReport rep = coincidence_check(full.model, sub.model, inst.frame, probes, rng());
      r.subspace_value_gap = normalized_subspace(rep);
      r.orthogonal_value_gap = normalized_orthogonal(rep);
      if (r.orthogonal_value_gap > kSeparationThreshold) ++separated;
      r.passed = r.subspace_value_gap <= tol;
      add(r, r.subspace_value_gap);
    } catch (const Error& e) {
      TrialRecord r = error_record(t, e);
      add(r, kInf);
    }
  }
  result.separation_rate = trials > 0 ? static_cast<double>(separated) / static_cast<double>(trials) : 1.0;
  if (result.separation_rate < 0.95) ++result.failures;

  // MFN pairs whose gradients differ inside col(Q): no coincidence even on
  // the subspace.
  DimensionRange wide = dims;
  for (Index t = 0; t < 20; ++t) {
    Rng rng(next_seed());
    const Dims nd = draw_dims(rng, wide, 2);
    const Index m = uniform_index(rng, 1, nd.d - 1);
    const Instance inst = random_instance({nd.n, nd.d, m, class_for_trial(t), rng()});
    TrialRecord r = blank_record(t, &inst);
    r.label = "mfn-pair-differing-in-subspace";
    const ModelResult full = fit_mfn(inst.samples);
    const ModelResult sub = fit_mfn(hat_sampleset(inst.samples, inst.frame));
    const Vector coeffs =
        std::max(1.0, sub.gradients.canonical.norm()) * gaussian_vector(rng, sub.gradients.freedom());
    const QuadraticModel moved = sub.with_gradient(sub.gradients.member(coeffs));
    const ConversionReport rep = coincidence_check(full.model, moved, inst.frame, probes, rng());
    r.subspace_value_gap = normalized_subspace(rep);
    r.passed = r.subspace_value_gap > 10.0 * tol;
    add(r, 0.0);
  }

  // MN has no hypothesis to violate, so no negative control is generated.
  {
    TrialRecord r = blank_record(0);
    r.label = "mn-no-negative-control";
    add(r, 0.0);
  }

  result.trials = static_cast<Index>(result.records.size());
  return result;
}

void write_trial_table(std::ostream& os, const std::vector<TheoremSuiteResult>& results) {
  os << "theorem,trial,label,n,d,m,function_class,gradient_gap,hessian_gap,family_gap,"
        "interpolation_gap,subspace_value_gap,orthogonal_value_gap,max_gap,pass\n";
  for (const TheoremSuiteResult& res : results) {
    for (const TrialRecord& r : res.records) {
      std::string label = r.label;
      std::replace(label.begin(), label.end(), ',', ';');
      std::replace(label.begin(), label.end(), '\n', ' ');
      os << to_string(res.theorem) << ',' << r.trial << ',' << label << ',' << r.n << ','
         << r.d << ',' << r.m << ',' << r.function_class << ',' << format_gap(r.gradient_gap)
         << ',' << format_gap(r.hessian_gap) << ',' << format_gap(r.family_gap) << ','
         << format_gap(r.interpolation_gap) << ',' << format_gap(r.subspace_value_gap) << ','
         << format_gap(r.orthogonal_value_gap) << ',' << format_gap(r.max_gap) << ','
         << (r.passed ? 1 : 0) << '\n';
    }
  }
}

void write_summary_table(std::ostream& os, const std::vector<TheoremSuiteResult>& results) {
  os << "theorem,trials,failures,max_gap,tol,seed,separation_rate\n";
  for (const TheoremSuiteResult& res : results) {
    os << to_string(res.theorem) << ',' << res.trials << ',' << res.failures << ','
       << format_gap(res.max_gap) << ',' << format_gap(res.tol) << ',' << res.seed << ','
       << (res.theorem == TheoremId::NegativeControls ? format_gap(res.separation_rate) : "")
       << '\n';
  }
}

}  // namespace subdfo
