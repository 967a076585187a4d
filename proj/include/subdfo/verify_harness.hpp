#pragma once

// Seeded random instances and per-theorem verification suites. Every trial
// derives its own RNG stream from (seed, trial index), so results do not
// depend on evaluation order.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "subdfo/sample_geometry.hpp"
#include "subdfo/test_functions.hpp"

namespace subdfo {

struct InstanceSpec {
  Index n = 3;
  Index d = 2;
  Index m = 3;
  FunctionClass function_class = FunctionClass::Quadratic;
  std::uint64_t seed = 0;
};

struct Instance {
  TestFunction function;
  SampleSet samples;
  SubspaceFrame frame;
};

/// Hatted displacements are redrawn until their quadratic constraint matrix
/// has full row rank with condition number below 1e7. Throws SpecInfeasible
/// when m > d(d+3)/2.
Instance random_instance(const InstanceSpec& spec);

enum class TheoremId { MN, DQICorollary, MFN, LFU, GSG, GSH, QGSDSimple, QGSDRefined, NegativeControls };

std::string_view to_string(TheoremId id);
/// Accepts the suite names printed by to_string. Throws UnknownTheorem.
TheoremId theorem_from_string(std::string_view name);
/// CLI selector: mn, dqi, mfn, lfu, gsg, gsh, qgsd (both variants), all
/// (every suite plus the negative controls).
std::vector<TheoremId> theorems_for_selector(std::string_view selector);

struct DimensionRange {
  Index n_min = 3;
  Index n_max = 30;
  Index d_max = 6;  // d is drawn from [1, min(n - 1, d_max)]
};

/// Gaps are already normalized (coefficient gaps by max(1, ||reference||),
/// value gaps by the report's value scale). NaN means "not measured".
struct TrialRecord {
  std::string label;
  Index trial = 0;
  Index n = 0;
  Index d = 0;
  Index m = 0;
  std::string function_class;
  double gradient_gap = 0.0;
  double hessian_gap = 0.0;
  double family_gap = 0.0;
  double interpolation_gap = 0.0;
  double subspace_value_gap = 0.0;
  double orthogonal_value_gap = 0.0;
  double max_gap = 0.0;
  bool passed = true;
};

struct TheoremSuiteResult {
  TheoremId theorem = TheoremId::MN;
  Index trials = 0;
  Index failures = 0;
  double max_gap = 0.0;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  /// Negative controls only: share of random-reference LFU trials whose
  /// orthogonal gap exceeded kSeparationThreshold.
  double separation_rate = 0.0;
  std::vector<TrialRecord> records;

  bool ok() const noexcept { return failures == 0; }
};

inline constexpr double kSeparationThreshold = 1e-4;
inline constexpr Index kDefaultProbes = 8;
inline constexpr Index kFamilyMembers = 20;

TheoremSuiteResult run_suite(TheoremId theorem, Index trials, const DimensionRange& dims,
                             double tol, std::uint64_t seed, Index probes = kDefaultProbes);

/// Cases where coincidence off the subspace must fail, plus the corner-set
/// LFU instance (gap 1/2 at e3) and a supported-reference control.
TheoremSuiteResult negative_controls(std::uint64_t seed, Index trials = 100, double tol = 1e-8,
                                     Index probes = kDefaultProbes);

/// Per-trial rows, comma separated, with a header line.
void write_trial_table(std::ostream& os, const std::vector<TheoremSuiteResult>& results);
/// One summary row per suite, with a header line.
void write_summary_table(std::ostream& os, const std::vector<TheoremSuiteResult>& results);

/// Independent sub-seed for trial `trial` of a run seeded with `seed`.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

}  // namespace subdfo
