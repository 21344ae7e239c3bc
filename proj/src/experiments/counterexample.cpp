#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "internal.hpp"

namespace plab {

using namespace detail;

namespace {

constexpr int kMaxStage = 9;  // 2^-(2^10) underflows a double

bool is_pure_square(const MapLift& lift) {
  const MapLift square = MapLift::power(2);
  return std::ranges::equal(lift.p1().coefficients(), square.p1().coefficients()) &&
         std::ranges::equal(lift.p2().coefficients(), square.p2().coefficients());
}

// Area-uniform disc |z| <= radius on an equal-area polar grid.
Cloud disc_grid(double radius, int rings, int spokes) {
  std::vector<ProjectivePoint> pts;
  for (int i = 0; i < rings; ++i) {
    const double r = radius * std::sqrt((i + 0.5) / rings);
    for (int j = 0; j < spokes; ++j) {
      pts.push_back(ProjectivePoint::affine(std::polar(r, 2.0 * std::numbers::pi * j / spokes)));
    }
  }
  return Cloud::uniform(std::move(pts), Provenance::counterexample);
}

}  // namespace

// nu_n = uniform measure on |z| = 2^(-2^n) is pushed by z^2 onto nu_{n+1}
// exactly and never charges {0, inf}, yet stays away from the equilibrium
// measure on the unit circle. The disc family with radii 2^-n is reported
// alongside for comparison; it is not invariant.
ExperimentResult run_counterexample(const ExperimentConfig& cfg) {
  require(!cfg.stages.empty(), "counterexample needs stages");
  require(cfg.stages.front() >= 1 && std::ranges::max(cfg.stages) <= kMaxStage,
          "counterexample stages must lie in 1..9");
  require(cfg.circle_points >= 2 && cfg.circle_points % 2 == 0, "circle_points must be even");
  const int max_stage = std::ranges::max(cfg.stages);
  const MapSequence seq = build_sequence(cfg, max_stage + cfg.build_depth);
  require(std::ranges::all_of(seq.lifts(), is_pure_square),
          "counterexample requires the constant z^2 sequence");
  const TestDictionary& dict = dictionary_by_version(cfg.dictionary);

  std::vector<ProjectivePoint> base = cfg.base_points;
  if (base.empty()) {
    std::vector<int> guarded;
    for (int n : cfg.stages) guarded.push_back(n + cfg.build_depth);
    base = select_base_points(seq, guarded, cfg.window, cfg.delta, 1, cfg.seed);
  }

  ExperimentResult result{ExperimentKind::counterexample, {}, Verdict::pass, {}, 0, cfg.seed,
                          "distance_to_equilibrium", 0.3};
  const std::array<ProjectivePoint, 2> poles{ProjectivePoint::zero(), ProjectivePoint::infinity()};
  auto radius = [](int n) { return std::exp2(-std::exp2(n)); };

  for (int n : cfg.stages) {
    const Cloud previous = reference_circle(radius(n - 1), cfg.circle_points, Provenance::counterexample);
    const Cloud current = reference_circle(radius(n), cfg.circle_points, Provenance::counterexample);
    // Squaring doubles angles, so K points land on the K/2-point circle. On
    // the smallest circles the duplicate merge also joins distinct points;
    // that leaves the integrals unchanged, so only the distance is checked.
    const Cloud halved = reference_circle(radius(n), cfg.circle_points / 2, Provenance::counterexample);
    const Cloud pushed = pushforward(seq, n, previous);
    const double residual = dict_distance(pushed, halved, dict);
    result.table.add(n, "pushforward_residual", residual, 0.0, 1e-9);
    if (!(residual <= 1e-9)) {
      result.verdict = combine(result.verdict, Verdict::fail);
    }

    const Estimate mu = equilibrium_estimate(seq, n, base[0], cfg, kReference + static_cast<std::uint64_t>(n));
    result.failed_orbits += mu.cloud.meta().failed_orbits;
    const double separation = dict_distance(current, mu.cloud, dict);
    result.table.add(n, "distance_to_equilibrium", separation, mu.noise, 0.3);
    if (!(separation - mu.noise > 0.3)) {
      result.verdict = combine(result.verdict, separation + mu.noise <= 0.3 ? Verdict::fail : Verdict::inconclusive);
    }

    const double pole_mass = current.mass_near(poles, std::numeric_limits<double>::min());
    result.table.add(n, "pole_mass", pole_mass, 0.0, 0.0);
    if (pole_mass != 0.0) result.verdict = combine(result.verdict, Verdict::fail);

    const Cloud disc_pushed = pushforward(seq, n, disc_grid(std::exp2(-(n - 1)), 64, 64));
    result.table.add(n, "literal_disc_residual", dict_distance(disc_pushed, disc_grid(std::exp2(-n), 64, 64), dict), 0.0);
  }
  result.notes.push_back("literal_disc_residual compares z^2 pushforwards of area measures on discs of radius 2^-(n-1) with radius 2^-n; nonzero values show that family is not invariant");
  return result;
}

}  // namespace plab
