#include <algorithm>

#include "internal.hpp"
#include "plab/errors.hpp"

namespace plab {

namespace {
constexpr int kMaxBasePointTries = 10000;
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::equidistribution: return "equidist";
    case ExperimentKind::invariance: return "invariance";
    case ExperimentKind::mixing: return "mixing";
    case ExperimentKind::corollary: return "corollary";
    case ExperimentKind::counterexample: return "counterexample";
    case ExperimentKind::critical_mass: return "critical-mass";
    case ExperimentKind::branch_diameters: return "branches";
  }
  return "?";
}

const std::vector<ExperimentKind>& all_experiments() {
  static const std::vector<ExperimentKind> kinds{
      ExperimentKind::equidistribution, ExperimentKind::invariance,    ExperimentKind::mixing,
      ExperimentKind::corollary,        ExperimentKind::counterexample, ExperimentKind::critical_mass,
      ExperimentKind::branch_diameters};
  return kinds;
}

ExperimentKind experiment_from_string(const std::string& s) {
  for (ExperimentKind k : all_experiments()) {
    if (to_string(k) == s) return k;
  }
  throw InvalidConfig("unknown experiment '" + s + "'");
}

std::string to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::sphere_uniform: return "sphere-uniform";
    case SourceKind::disc_uniform: return "disc-uniform";
    case SourceKind::circle: return "circle";
    case SourceKind::pole: return "pole";
  }
  return "?";
}

SourceKind source_from_string(const std::string& s) {
  for (SourceKind k : {SourceKind::sphere_uniform, SourceKind::disc_uniform, SourceKind::circle,
                       SourceKind::pole}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidConfig("unknown source kind '" + s + "'");
}

std::string to_string(ReferenceKind kind) {
  return kind == ReferenceKind::monte_carlo ? "monte-carlo" : "unit-circle";
}

ReferenceKind reference_from_string(const std::string& s) {
  if (s == "monte-carlo") return ReferenceKind::monte_carlo;
  if (s == "unit-circle") return ReferenceKind::unit_circle;
  throw InvalidConfig("unknown reference '" + s + "'");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::inconclusive: return "INCONCLUSIVE";
    case Verdict::expected_fail: return "EXPECTED-FAIL";
  }
  return "?";
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::pass, Verdict::fail, Verdict::inconclusive, Verdict::expected_fail}) {
    if (to_string(v) == s) return v;
  }
  throw InvalidConfig("unknown verdict '" + s + "'");
}

Verdict below_threshold(double value, double noise, double threshold) {
  if (value + noise < threshold) return Verdict::pass;
  if (value - noise >= threshold) return Verdict::fail;
  return Verdict::inconclusive;
}

Verdict combine(Verdict a, Verdict b) {
  auto rank = [](Verdict v) {
    switch (v) {
      case Verdict::fail: return 3;
      case Verdict::inconclusive: return 2;
      case Verdict::expected_fail: return 1;
      case Verdict::pass: return 0;
    }
    return 3;
  };
  return rank(a) >= rank(b) ? a : b;
}

MapSequence build_sequence(const ExperimentConfig& cfg, int length) {
  return family_sample(cfg.family, length, cfg.seed);
}

std::vector<ProjectivePoint> select_base_points(const MapSequence& seq, const std::vector<int>& stages,
                                                int window, double delta, std::size_t count,
                                                std::uint64_t seed) {
  std::vector<ProjectivePoint> critical;
  for (int n : stages) {
    if (n < 1) continue;
    for (const Root& r : critical_data(seq, std::max(0, n - window), n)) critical.push_back(r.point);
  }
  Rng rng(derive_seed(seed, detail::kBasePoints));
  std::vector<ProjectivePoint> out;
  for (int tries = 0; out.size() < count; ++tries) {
    if (tries >= kMaxBasePointTries) {
      throw BasePointSelectionFailed("no base point clear of the critical values after " +
                                     std::to_string(kMaxBasePointTries) + " tries; delta " +
                                     format_number(delta) + " is too large");
    }
    const double h = 2.0 * uniform01(rng) - 1.0;
    const double a = 2.0 * std::numbers::pi * uniform01(rng);
    const ProjectivePoint p(std::polar(std::sqrt((1.0 + h) / 2.0), a), cplx(std::sqrt((1.0 - h) / 2.0)));
    const bool clear = std::ranges::all_of(
        critical, [&](const ProjectivePoint& v) { return chordal_dist(p, v) > delta; });
    if (clear) out.push_back(p);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::equidistribution: return run_equidistribution(cfg);
    case ExperimentKind::invariance: return run_invariance(cfg);
    case ExperimentKind::mixing: return run_mixing(cfg);
    case ExperimentKind::corollary: return run_corollary(cfg);
    case ExperimentKind::counterexample: return run_counterexample(cfg);
    case ExperimentKind::critical_mass: return run_critical_mass(cfg);
    case ExperimentKind::branch_diameters: return run_branch_diameters(cfg);
  }
  throw InvalidConfig("unknown experiment");
}

namespace detail {

Estimate preimage_measure(const MapSequence& seq, int m, int n, const ProjectivePoint& x,
                          const ExperimentConfig& cfg, std::uint64_t stream) {
  const DegreeProduct dp = seq.degree_product(m, m + n);
  if (dp.exact && *dp.exact <= cfg.cap) {
    return {exact_fiber_measure(seq, m, n, x, cfg.cap), 0.0, true};
  }
  return {backward_sample(seq, m, n, x, cfg.samples, derive_seed(cfg.seed, stream)),
          noise_floor(cfg.samples), false};
}

Estimate equilibrium_estimate(const MapSequence& seq, int m, const ProjectivePoint& x,
                              const ExperimentConfig& cfg, std::uint64_t stream) {
  if (cfg.reference == ReferenceKind::unit_circle) {
    return {reference_circle(1.0, cfg.circle_points), 0.0, true};
  }
  return {backward_sample(seq, m, cfg.build_depth, x, cfg.samples, derive_seed(cfg.seed, stream)),
          noise_floor(cfg.samples), false};
}

bool non_increasing(const std::vector<double>& values, double slack) {
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[k - 1] + slack) return false;
  }
  return true;
}

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidConfig(message);
}

}  // namespace detail
}  // namespace plab
