// subdfo: fit interpolation and simplex-derivative models, convert them
// between a subspace and the full space, and run the verification suites.
//
// Exit codes: 0 ok, 1 input error, 2 mathematical precondition failed,
// 3 verification failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "subdfo/errors.hpp"
#include "subdfo/interpolation.hpp"
#include "subdfo/io.hpp"
#include "subdfo/simplex_calculus.hpp"
#include "subdfo/subspace_bridge.hpp"
#include "subdfo/test_functions.hpp"
#include "subdfo/verify_harness.hpp"

namespace {

using namespace subdfo;
using io::Json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitMath = 2;
constexpr int kExitVerify = 3;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Infeasible:
    case ErrorKind::NotPoised:
    case ErrorKind::NotInSubspace:
    case ErrorKind::ReferenceMismatch:
    case ErrorKind::VariantPreconditionViolated:
    case ErrorKind::SpecInfeasible:
      return kExitMath;
    default:
      return kExitInput;
  }
}

struct Options {
  std::string kind;
  std::string in;
  std::string out;
  std::string href;
  std::string variant = "simple";
  bool symmetrize = false;
  std::string function;
  double tol = 1e-9;
  std::optional<double> rank_tol;

  std::string frame;
  std::string full;
  std::string sub;
  Index probes = kDefaultProbes;
  std::uint64_t seed = 42;
  std::optional<double> scale;

  std::string theorem = "all";
  Index trials = 200;
  double verify_tol = 1e-8;
  Index n_min = 3;
  Index n_max = 30;
  Index d_max = 6;
};

Json rank_tol_json(const Options& o) {
  return o.rank_tol ? Json(*o.rank_tol) : Json("default");
}

void emit(const Options& o, const Json& doc) {
  if (o.out.empty() || o.out == "-") {
    std::cout << doc.dump(2) << '\n';
  } else {
    io::write_json_file(o.out, doc);
  }
}

SymMatrix parse_href(const std::string& spec, Index n) {
  if (spec == "0") return SymMatrix::zero(n);
  if (spec.size() > 1 && spec[0] == 'I' &&
      spec.find_first_not_of("0123456789", 1) == std::string::npos) {
    const Index order = std::stol(spec.substr(1));
    if (order != n) {
      throw Error(ErrorKind::DimensionMismatch,
                  "--href " + spec + " does not match n = " + std::to_string(n));
    }
    return SymMatrix::identity(order);
  }
  SymMatrix h = io::symmetric_from_json(io::read_json_file(spec));
  if (h.order() != n) {
    throw Error(ErrorKind::DimensionMismatch, "reference Hessian has order " +
                                                  std::to_string(h.order()) + ", expected " +
                                                  std::to_string(n));
  }
  return h;
}

int cmd_fit(const Options& o) {
  const ModelKind kind = model_kind_from_string(o.kind);
  const FitOptions fit{o.rank_tol, o.tol};
  Json config{{"command", "fit"}, {"kind", o.kind}, {"in", o.in}, {"tol", o.tol},
              {"rank_tol", rank_tol_json(o)}};
  const Json input = io::read_json_file(o.in);
  ModelResult result;
  if (kind == ModelKind::QGSD) {
    if (o.function.empty()) {
      throw Error(ErrorKind::InvalidArgument, "--function is required for --kind qgsd");
    }
    const DirectionBundle bundle = io::bundle_from_json(input);
    const Vector x0 = io::bundle_base_from_json(input).value_or(Vector::Zero(bundle.dim()));
    const TestFunction f = make_named_function(o.function, bundle.dim());
    result = fit_qgsd(x0, bundle, f.oracle, qgsd_variant_from_string(o.variant), o.symmetrize,
                      o.rank_tol);
    config["variant"] = o.variant;
    config["symmetrize"] = o.symmetrize;
    config["function"] = o.function;
  } else {
    const SampleSet y = io::sampleset_from_json(input);
    switch (kind) {
      case ModelKind::DQI: result = fit_dqi(y, fit); break;
      case ModelKind::MN: result = fit_mn(y, fit); break;
      case ModelKind::MFN: result = fit_mfn(y, fit); break;
      case ModelKind::LFU:
        if (o.href.empty()) throw Error(ErrorKind::InvalidArgument, "--href is required for --kind lfu");
        result = fit_lfu(y, parse_href(o.href, y.dim()), fit);
        config["href"] = o.href;
        break;
      case ModelKind::QGSD: break;
    }
  }
  Json doc = io::to_json(result);
  if (result.consumed) doc["consumed"] = io::to_json(*result.consumed);
  doc["config"] = std::move(config);
  emit(o, doc);
  return kExitOk;
}

int cmd_detect(const Options& o) {
  const SampleSet y = io::sampleset_from_json(io::read_json_file(o.in));
  Json doc = io::to_json(detect_subspace(y, o.rank_tol));
  doc["config"] = {{"command", "subspace detect"}, {"in", o.in}, {"rank_tol", rank_tol_json(o)}};
  emit(o, doc);
  return kExitOk;
}

int cmd_hat(const Options& o) {
  const SampleSet y = io::sampleset_from_json(io::read_json_file(o.in));
  const SubspaceFrame frame = io::frame_from_json(io::read_json_file(o.frame));
  Json doc = io::to_json(hat_sampleset(y, frame));
  doc["config"] = {{"command", "subspace hat"}, {"in", o.in}, {"frame", o.frame}};
  emit(o, doc);
  return kExitOk;
}

int cmd_lift(const Options& o) {
  const ModelResult sub = io::model_from_json(io::read_json_file(o.in));
  const SubspaceFrame frame = io::frame_from_json(io::read_json_file(o.frame));
  Json config{{"command", "subspace lift"}, {"in", o.in}, {"frame", o.frame}};
  ModelResult lifted;
  switch (sub.kind) {
    case ModelKind::DQI:
    case ModelKind::MN: lifted = lift_mn(sub, frame); break;
    case ModelKind::MFN: lifted = lift_mfn(sub, frame); break;
    case ModelKind::LFU:
      if (o.href.empty()) throw Error(ErrorKind::InvalidArgument, "--href is required to lift an LFU model");
      lifted = lift_lfu(sub, frame, parse_href(o.href, frame.ambient()));
      config["href"] = o.href;
      break;
    case ModelKind::QGSD: lifted = lift_qgsd(sub, frame); break;
  }
  Json doc = io::to_json(lifted);
  doc["config"] = std::move(config);
  emit(o, doc);
  return kExitOk;
}

int cmd_restrict(const Options& o) {
  const ModelResult full = io::model_from_json(io::read_json_file(o.in));
  const SubspaceFrame frame = io::frame_from_json(io::read_json_file(o.frame));
  Json doc = io::to_json(restrict_model(full, frame));
  doc["config"] = {{"command", "subspace restrict"}, {"in", o.in}, {"frame", o.frame}};
  emit(o, doc);
  return kExitOk;
}

int cmd_compare(const Options& o) {
  const ModelResult full = io::model_from_json(io::read_json_file(o.full));
  const ModelResult sub = io::model_from_json(io::read_json_file(o.sub));
  const SubspaceFrame frame = io::frame_from_json(io::read_json_file(o.frame));
  Json doc = io::to_json(compare_models(full, sub, frame, o.probes, o.seed, o.scale));
  doc["config"] = {{"command", "subspace compare"}, {"full", o.full}, {"sub", o.sub},
                   {"frame", o.frame}, {"probes", o.probes}, {"seed", o.seed},
                   {"scale", o.scale ? Json(*o.scale) : Json("median displacement norm")}};
  emit(o, doc);
  return kExitOk;
}

int cmd_verify(const Options& o) {
  const DimensionRange dims{o.n_min, o.n_max, o.d_max};
  std::vector<TheoremSuiteResult> results;
  for (TheoremId id : theorems_for_selector(o.theorem)) {
    results.push_back(run_suite(id, o.trials, dims, o.verify_tol, o.seed, o.probes));
  }
  Json config{{"command", "verify"}, {"theorem", o.theorem}, {"trials", o.trials},
              {"seed", o.seed}, {"tol", o.verify_tol}, {"probes", o.probes},
              {"n_min", o.n_min}, {"n_max", o.n_max}, {"d_max", o.d_max}};
  if (!o.out.empty()) {
    const std::filesystem::path dir(o.out);
    std::filesystem::create_directories(dir);
    std::ofstream trials(dir / "trials.csv");
    write_trial_table(trials, results);
    std::ofstream summary(dir / "summary.csv");
    write_summary_table(summary, results);
    io::write_json_file(dir / "config.json", config);
    if (!trials || !summary) throw Error(ErrorKind::MalformedInput, "could not write reports to " + o.out);
  }
  std::cout << "# config " << config.dump() << '\n';
  write_summary_table(std::cout, results);
  bool ok = true;
  for (const TheoremSuiteResult& r : results) ok = ok && r.ok();
  return ok ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadratic interpolation and simplex-derivative models in full and subspace coordinates"};
  app.require_subcommand(1);
  Options o;

  auto* fit = app.add_subcommand("fit", "Fit a model to a sample set (or a direction bundle for qgsd)");
  fit->add_option("--kind", o.kind, "dqi | mn | mfn | lfu | qgsd")->required();
  fit->add_option("--in", o.in, "Sample-set file (direction-bundle file for qgsd)")->required();
  fit->add_option("--out", o.out, "Model file (stdout if omitted)");
  fit->add_option("--href", o.href, "Reference Hessian for lfu: file, I<n> or 0");
  fit->add_option("--variant", o.variant, "qgsd variant: simple | refined")->capture_default_str();
  fit->add_flag("--symmetrize", o.symmetrize, "Store only the symmetric part of the qgsd Hessian");
  fit->add_option("--function", o.function, "Built-in function for qgsd, e.g. sphere, trig:3");
  fit->add_option("--tol", o.tol, "Feasibility tolerance relative to max(1, max|f|)")->capture_default_str();
  fit->add_option("--rank-tol", o.rank_tol, "Relative singular-value cutoff");

  auto* subspace = app.add_subcommand("subspace", "Subspace detection and conversions");
  subspace->require_subcommand(1);
  auto* detect = subspace->add_subcommand("detect", "Find the affine subspace spanned by a sample set");
  detect->add_option("--in", o.in, "Sample-set file")->required();
  detect->add_option("--out", o.out, "Frame file (stdout if omitted)");
  detect->add_option("--rank-tol", o.rank_tol, "Relative singular-value cutoff");
  auto* hat = subspace->add_subcommand("hat", "Express a sample set in subspace coordinates");
  hat->add_option("--in", o.in, "Sample-set file")->required();
  hat->add_option("--frame", o.frame, "Frame file")->required();
  hat->add_option("--out", o.out, "Sample-set file (stdout if omitted)");
  auto* lift = subspace->add_subcommand("lift", "Lift a subspace model to the full space");
  lift->add_option("--in", o.in, "Subspace model file")->required();
  lift->add_option("--frame", o.frame, "Frame file")->required();
  lift->add_option("--href", o.href, "Full-space reference Hessian for lfu: file, I<n> or 0");
  lift->add_option("--out", o.out, "Model file (stdout if omitted)");
  auto* restrict_cmd = subspace->add_subcommand("restrict", "Restrict a full-space model to the subspace");
  restrict_cmd->add_option("--in", o.in, "Full-space model file")->required();
  restrict_cmd->add_option("--frame", o.frame, "Frame file")->required();
  restrict_cmd->add_option("--out", o.out, "Model file (stdout if omitted)");
  auto* compare = subspace->add_subcommand("compare", "Compare a full-space and a subspace model");
  compare->add_option("--full", o.full, "Full-space model file")->required();
  compare->add_option("--sub", o.sub, "Subspace model file")->required();
  compare->add_option("--frame", o.frame, "Frame file")->required();
  compare->add_option("--probes", o.probes, "Random probe count")->capture_default_str();
  compare->add_option("--seed", o.seed, "Probe seed")->capture_default_str();
  compare->add_option("--scale", o.scale, "Probe scale (default: median displacement norm)");
  compare->add_option("--out", o.out, "Report file (stdout if omitted)");

  auto* verify = app.add_subcommand("verify", "Run randomized verification suites");
  verify->add_option("--theorem", o.theorem,
                     "mn | dqi | mfn | lfu | gsg | gsh | qgsd[-simple|-refined] | negative-controls | all")
      ->capture_default_str();
  verify->add_option("--trials", o.trials, "Trials per suite")->capture_default_str()->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", o.seed, "Base seed")->capture_default_str();
  verify->add_option("--tol", o.verify_tol, "Normalized gap tolerance")->capture_default_str();
  verify->add_option("--probes", o.probes, "Probes per coincidence check")->capture_default_str();
  verify->add_option("--n-min", o.n_min, "Smallest ambient dimension")->capture_default_str();
  verify->add_option("--n-max", o.n_max, "Largest ambient dimension")->capture_default_str();
  verify->add_option("--d-max", o.d_max, "Largest subspace dimension")->capture_default_str();
  verify->add_option("--out", o.out, "Directory for trials.csv, summary.csv and config.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (fit->parsed()) return cmd_fit(o);
    if (detect->parsed()) return cmd_detect(o);
    if (hat->parsed()) return cmd_hat(o);
    if (lift->parsed()) return cmd_lift(o);
    if (restrict_cmd->parsed()) return cmd_restrict(o);
    if (compare->parsed()) return cmd_compare(o);
    if (verify->parsed()) return cmd_verify(o);
  } catch (const Error& e) {
    std::cerr << "subdfo: " << e.what() << '\n';
    if (!std::isnan(e.residual())) std::cerr << "subdfo: residual " << e.residual() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "subdfo: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
