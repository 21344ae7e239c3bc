#include <algorithm>
#include <cmath>

#include "internal.hpp"

namespace plab {

using namespace detail;

ExperimentResult run_critical_mass(const ExperimentConfig& cfg) {
  require(cfg.window >= 1, "critical-mass needs a window length of at least 1");
  require(!cfg.stages.empty(), "critical-mass needs stages");
  require(cfg.stages.front() >= cfg.window, "critical-mass stages must be at least the window length");
  require(cfg.delta_levels >= 1, "delta_levels must be positive");
  const int max_stage = std::ranges::max(cfg.stages);
  const MapSequence seq = build_sequence(cfg, max_stage + cfg.build_depth);

  std::vector<ProjectivePoint> base = cfg.base_points;
  if (base.empty()) {
    std::vector<int> guarded;
    for (int n : cfg.stages) guarded.push_back(n + cfg.build_depth);
    base = select_base_points(seq, guarded, cfg.window, cfg.delta, 1, cfg.seed);
  }

  ExperimentResult result{ExperimentKind::critical_mass, {}, Verdict::pass, {}, 0, cfg.seed,
                          "uniform_delta", cfg.epsilon};
  const double noise = noise_floor(cfg.samples);
  // admissible[j]: radius 2^-(j+1) keeps the mass below epsilon at every stage.
  std::vector<bool> admissible(static_cast<std::size_t>(cfg.delta_levels), true);

  for (int n : cfg.stages) {
    const Cloud mu = backward_sample(seq, n, cfg.build_depth, base[0], cfg.samples,
                                     derive_seed(cfg.seed, kCriticalMass + static_cast<std::uint64_t>(n)));
    result.failed_orbits += mu.meta().failed_orbits;
    std::vector<ProjectivePoint> critical;
    for (const Root& r : critical_data(seq, n - cfg.window, n)) critical.push_back(r.point);

    std::vector<double> masses;
    for (int j = 1; j <= cfg.delta_levels; ++j) {
      const double mass = mu.mass_near(critical, std::exp2(-j));
      masses.push_back(mass);
      result.table.add(n, "mass[delta=2^-" + std::to_string(j) + "]", mass, noise, cfg.epsilon);
      if (!(mass + noise < cfg.epsilon)) admissible[static_cast<std::size_t>(j - 1)] = false;
    }
    if (!non_increasing(masses, 0.0)) {
      result.notes.push_back("mass grew as delta shrank at stage " + std::to_string(n));
      result.verdict = combine(result.verdict, Verdict::fail);
    }
    // At the smallest radius the mass must be indistinguishable from zero.
    if (masses.back() > noise) {
      result.notes.push_back("mass at the smallest delta exceeds the noise floor at stage " + std::to_string(n));
      result.verdict = combine(result.verdict, Verdict::inconclusive);
    }
  }

  const auto first = std::ranges::find(admissible, true);
  const int last_stage = cfg.stages.back();
  if (first == admissible.end()) {
    result.table.add(last_stage, "uniform_delta", 0.0, 0.0, cfg.epsilon);
    result.notes.push_back("no tested delta keeps the critical mass below epsilon at every stage");
    result.verdict = combine(result.verdict, Verdict::fail);
  } else {
    const auto j = static_cast<int>(first - admissible.begin()) + 1;
    result.table.add(last_stage, "uniform_delta", std::exp2(-j), 0.0, cfg.epsilon);
  }
  return result;
}

}  // namespace plab
