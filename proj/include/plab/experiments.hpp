#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plab/maps.hpp"
#include "plab/measures.hpp"
#include "plab/table.hpp"

namespace plab {

enum class ExperimentKind {
  equidistribution,
  invariance,
  mixing,
  corollary,
  counterexample,
  critical_mass,
  branch_diameters,
};

/// CLI names: equidist, invariance, mixing, corollary, counterexample,
/// critical-mass, branches.
std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& s);
const std::vector<ExperimentKind>& all_experiments();

enum class SourceKind { sphere_uniform, disc_uniform, circle, pole };
std::string to_string(SourceKind kind);
SourceKind source_from_string(const std::string& s);

/// The measure nu pulled back by the corollary experiment.
struct SourceSpec {
  SourceKind kind = SourceKind::sphere_uniform;
  cplx center = 0.0;
  double radius = 1.0;
  std::size_t count = 64;
};

/// Reference measure for the equilibrium measure at a stage.
enum class ReferenceKind { monte_carlo, unit_circle };
std::string to_string(ReferenceKind kind);
ReferenceKind reference_from_string(const std::string& s);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::equidistribution;
  FamilySpec family;
  std::uint64_t seed = 7;
  /// Depth schedule n (strictly increasing).
  std::vector<int> depths{4, 5, 6, 7, 8, 9, 10, 11, 12};
  /// Monte Carlo sample count N.
  std::size_t samples = 100000;
  /// Explicit base points; selected by rejection sampling when empty.
  std::vector<ProjectivePoint> base_points;
  /// Critical-value window length l.
  int window = 1;
  /// Neighbourhood radius delta around critical values.
  double delta = 0.05;
  std::string dictionary = kDictionaryVersion;
  double epsilon = 0.05;
  /// Target stages m for the equidistribution limit statistic; the first
  /// entry is also the base stage of the corollary pullback.
  std::vector<int> m_values{0};
  /// Backward depth used to build Monte Carlo equilibrium estimates.
  int build_depth = 20;
  /// Stages tested by invariance, counterexample and critical-mass.
  std::vector<int> stages{1, 2, 3, 4, 5};
  SourceSpec source;
  ReferenceKind reference = ReferenceKind::monte_carlo;
  /// Disc for branch tracking, in the affine chart.
  cplx disc_center = 2.0;
  double disc_radius = 0.1;
  /// Branch-diameter constant; fitted at the smallest depth when absent.
  std::optional<double> branch_c;
  std::uint64_t cap = kDefaultEnumerationCap;
  /// Mixing (phi, psi) dictionary index pairs; empty means all pairs.
  std::vector<std::pair<int, int>> pairs;
  /// Critical-mass radii are 2^-1, ..., 2^-delta_levels.
  int delta_levels = 10;
  /// Points per sampled circle (reference and counterexample circles).
  std::size_t circle_points = 4096;
};

enum class Verdict { pass, fail, inconclusive, expected_fail };
std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct ExperimentResult {
  ExperimentKind experiment;
  DecayTable table;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> notes;
  int failed_orbits = 0;
  std::uint64_t seed = 0;
  /// Final value of the headline statistic and the threshold it is judged
  /// against (for summaries).
  std::string headline;
  double threshold = 0.0;
};

/// PASS when value + noise < threshold, FAIL when value - noise >= threshold,
/// otherwise INCONCLUSIVE.
Verdict below_threshold(double value, double noise, double threshold);
/// FAIL dominates INCONCLUSIVE dominates PASS.
Verdict combine(Verdict a, Verdict b);

/// The configured family sampled to `length` maps with the config seed.
MapSequence build_sequence(const ExperimentConfig& cfg, int length);

/// Rejection-samples sphere-uniform points until `count` of them lie farther
/// than delta (chordal) from every critical value of the windows (n-l, n)
/// for n in `stages`. Throws BasePointSelectionFailed after 10^4 tries.
std::vector<ProjectivePoint> select_base_points(const MapSequence& seq, const std::vector<int>& stages,
                                                int window, double delta, std::size_t count,
                                                std::uint64_t seed);

ExperimentResult run_equidistribution(const ExperimentConfig& cfg);
ExperimentResult run_invariance(const ExperimentConfig& cfg);
ExperimentResult run_mixing(const ExperimentConfig& cfg);
ExperimentResult run_corollary(const ExperimentConfig& cfg);
ExperimentResult run_counterexample(const ExperimentConfig& cfg);
ExperimentResult run_critical_mass(const ExperimentConfig& cfg);
ExperimentResult run_branch_diameters(const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Inverse branches of P(0, n) over a disc, tracked by continuation.
struct BranchTracking {
  /// Chordal diameter per successfully tracked branch.
  std::vector<double> diameters;
  /// Branches (counted with multiplicity) whose continuation failed.
  int failed = 0;
  int total = 0;
};

BranchTracking track_branches(const MapSequence& seq, int n, cplx center, double radius,
                              int boundary_samples = 16);

}  // namespace plab
