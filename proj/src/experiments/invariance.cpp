#include <algorithm>

#include "internal.hpp"

namespace plab {

using namespace detail;

namespace {

// Deepest depth <= limit whose fiber still fits the enumeration cap.
int deepest_exact_depth(const MapSequence& seq, int m, int limit, std::uint64_t cap) {
  int depth = 0;
  for (int n = 1; n <= limit; ++n) {
    const DegreeProduct dp = seq.degree_product(m, m + n);
    if (!dp.exact || *dp.exact > cap) break;
    depth = n;
  }
  return depth;
}

}  // namespace

ExperimentResult run_invariance(const ExperimentConfig& cfg) {
  require(!cfg.stages.empty(), "invariance needs stages");
  require(cfg.stages.front() >= 1, "invariance stages start at 1");
  require(cfg.build_depth >= 1, "build depth must be positive");
  const int max_stage = std::ranges::max(cfg.stages);
  const MapSequence seq = build_sequence(cfg, max_stage + cfg.build_depth);
  const TestDictionary& dict = dictionary_by_version(cfg.dictionary);

  std::vector<int> guarded;
  for (int n : cfg.stages) {
    guarded.push_back(n - 1 + cfg.build_depth);
    guarded.push_back(n + cfg.build_depth);
  }
  std::vector<ProjectivePoint> base = cfg.base_points;
  if (base.size() < 2) {
    const auto picked = select_base_points(seq, guarded, cfg.window, cfg.delta, 2 - base.size(), cfg.seed);
    base.insert(base.end(), picked.begin(), picked.end());
  }

  ExperimentResult result{ExperimentKind::invariance, {}, Verdict::pass, {}, 0, cfg.seed, "residual", 0.0};
  const double noise = noise_floor(cfg.samples);
  const bool underpowered = cfg.samples < 1000;
  if (underpowered) result.notes.push_back("fewer than 1000 samples: underpowered, verdict INCONCLUSIVE");

  for (int n : cfg.stages) {
    const auto sn = static_cast<std::uint64_t>(n);
    const Cloud before = backward_sample(seq, n - 1, cfg.build_depth, base[0], cfg.samples,
                                         derive_seed(cfg.seed, kInvariancePrev + sn));
    const Cloud after = backward_sample(seq, n, cfg.build_depth, base[0], cfg.samples,
                                        derive_seed(cfg.seed, kInvarianceNext + sn));
    result.failed_orbits += before.meta().failed_orbits + after.meta().failed_orbits;
    const double residual = dict_distance(pushforward(seq, n, before), after, dict);

    // Equidistribution tail at the build depth, estimated from the deepest
    // exact preimage measures of two base points.
    const int exact_depth = deepest_exact_depth(seq, n - 1, cfg.build_depth, cfg.cap);
    const double tail = dict_distance(exact_fiber_measure(seq, n - 1, exact_depth, base[0], cfg.cap),
                                      exact_fiber_measure(seq, n - 1, exact_depth, base[1], cfg.cap), dict);
    const double bound = 2.0 * noise + tail;
    result.table.add(n, "tail_estimate", tail, 0.0);
    result.table.add(n, "residual", residual, noise, bound);
    if (underpowered) {
      result.verdict = combine(result.verdict, Verdict::inconclusive);
    } else if (residual > bound) {
      result.verdict = combine(result.verdict, Verdict::fail);
    }
  }
  result.threshold = result.table.last("residual")->bound.value_or(0.0);
  return result;
}

}  // namespace plab
