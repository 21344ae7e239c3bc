#include <algorithm>

#include "internal.hpp"
#include "plab/errors.hpp"

namespace plab {

using namespace detail;

namespace {

Cloud make_source(const SourceSpec& s, std::uint64_t seed) {
  switch (s.kind) {
    case SourceKind::sphere_uniform: return sphere_uniform(s.count, seed);
    case SourceKind::disc_uniform: return disc_uniform(s.center, s.radius, s.count, seed);
    case SourceKind::circle: return reference_circle(s.radius, s.count);
    case SourceKind::pole: return Cloud::point_mass(ProjectivePoint::infinity());
  }
  throw InvalidConfig("unknown source kind");
}

bool pole_totally_invariant(const MapSequence& seq, int from, int to) {
  for (int j = from + 1; j <= to; ++j) {
    const std::vector<Root> roots = fiber(seq.lift(j), ProjectivePoint::infinity());
    if (roots.size() != 1 || roots.front().multiplicity != seq.degree(j)) return false;
  }
  return true;
}

}  // namespace

ExperimentResult run_corollary(const ExperimentConfig& cfg) {
  require(!cfg.depths.empty(), "corollary needs a depth schedule");
  require(cfg.depths.front() >= 0, "depths must be nonnegative");
  const int m = cfg.m_values.empty() ? 0 : cfg.m_values.front();
  require(m >= 0, "base stage must be nonnegative");
  const int max_n = cfg.depths.back();
  const MapSequence seq = build_sequence(cfg, m + std::max(max_n, cfg.build_depth));
  const TestDictionary& dict = dictionary_by_version(cfg.dictionary);

  std::vector<ProjectivePoint> base = cfg.base_points;
  if (base.empty() && cfg.reference == ReferenceKind::monte_carlo) {
    base = select_base_points(seq, {m + cfg.build_depth}, cfg.window, cfg.delta, 1, cfg.seed);
  }
  if (base.empty()) base.push_back(ProjectivePoint::affine(2.0));

  ExperimentResult result{ExperimentKind::corollary, {}, Verdict::pass, {}, 0, cfg.seed,
                          "distance_to_equilibrium", cfg.epsilon};
  const Cloud source = make_source(cfg.source, derive_seed(cfg.seed, kSource));
  const Estimate limit = equilibrium_estimate(seq, m, base[0], cfg, kReference + static_cast<std::uint64_t>(m));
  result.failed_orbits += limit.cloud.meta().failed_orbits;

  bool noted = false;
  for (int n : cfg.depths) {
    PullbackOptions opts;
    opts.cap = cfg.cap;
    opts.count = cfg.samples;
    opts.seed = derive_seed(cfg.seed, kCorollary + static_cast<std::uint64_t>(n));
    double noise = limit.noise;
    Cloud pulled = [&] {
      try {
        return pullback_measure(seq, m, n, source, opts);
      } catch (const CapExceeded&) {
        if (!noted) {
          result.notes.push_back("enumeration cap exceeded from depth " + std::to_string(n) +
                                 ": switched to Monte Carlo pullback");
          noted = true;
        }
        opts.mode = PullbackMode::monte_carlo;
        noise += noise_floor(cfg.samples);
        return pullback_measure(seq, m, n, source, opts);
      }
    }();
    result.failed_orbits += pulled.meta().failed_orbits;
    const double d = dict_distance(pulled, limit.cloud, dict);
    result.table.add(n, "distance_to_equilibrium", d, noise, cfg.epsilon);
  }
  const DecayRow final_row = *result.table.last("distance_to_equilibrium");
  Verdict v = below_threshold(final_row.value, final_row.noise_floor, cfg.epsilon);
  if (cfg.source.kind == SourceKind::pole && pole_totally_invariant(seq, m, m + max_n)) {
    result.notes.push_back("source sits on a totally invariant point; convergence not expected");
    v = v == Verdict::pass ? Verdict::fail : Verdict::expected_fail;
  }
  result.verdict = v;
  return result;
}

}  // namespace plab
