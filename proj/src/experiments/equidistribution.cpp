#include <algorithm>

#include "internal.hpp"

namespace plab {

using namespace detail;

ExperimentResult run_equidistribution(const ExperimentConfig& cfg) {
  require(!cfg.depths.empty(), "equidist needs a depth schedule");
  require(cfg.depths.front() >= 0, "depths must be nonnegative");
  require(std::ranges::all_of(cfg.m_values, [](int m) { return m >= 0; }), "m values must be nonnegative");
  require(cfg.samples >= 1, "samples must be positive");
  const int max_n = cfg.depths.back();
  const int max_m = cfg.m_values.empty() ? 0 : std::ranges::max(cfg.m_values);
  const MapSequence seq = build_sequence(cfg, std::max(max_n, max_m + cfg.build_depth));
  const TestDictionary& dict = dictionary_by_version(cfg.dictionary);

  std::vector<int> guarded = cfg.depths;
  for (int m : cfg.m_values) guarded.push_back(m + cfg.build_depth);
  std::vector<ProjectivePoint> base = cfg.base_points;
  if (base.size() < 3) {
    const auto picked = select_base_points(seq, guarded, cfg.window, cfg.delta, 3 - base.size(), cfg.seed);
    base.insert(base.end(), picked.begin(), picked.end());
  }
  const ProjectivePoint& x = base[0];
  const ProjectivePoint& y = base[1];
  const ProjectivePoint& z = base[2];

  ExperimentResult result{ExperimentKind::equidistribution, {}, Verdict::pass, {}, 0, cfg.seed, "", cfg.epsilon};
  std::vector<Estimate> limits;
  for (int m : cfg.m_values) {
    limits.push_back(equilibrium_estimate(seq, m, z, cfg, kReference + static_cast<std::uint64_t>(m)));
    result.failed_orbits += limits.back().cloud.meta().failed_orbits;
  }

  bool any_monte_carlo = false;
  for (int n : cfg.depths) {
    const auto sn = static_cast<std::uint64_t>(n);
    const Estimate ex = preimage_measure(seq, 0, n, x, cfg, kEtaX + sn);
    const Estimate ey = preimage_measure(seq, 0, n, y, cfg, kEtaY + sn);
    any_monte_carlo = any_monte_carlo || !ex.exact;
    result.failed_orbits += ex.cloud.meta().failed_orbits + ey.cloud.meta().failed_orbits;
    result.table.add(n, "eta_x_vs_eta_y", dict_distance(ex.cloud, ey.cloud, dict), ex.noise + ey.noise,
                     cfg.epsilon);
    for (std::size_t k = 0; k < cfg.m_values.size(); ++k) {
      const int m = cfg.m_values[k];
      if (n - m < 0) continue;
      const Estimate e = m == 0 ? ex
                                : preimage_measure(seq, m, n - m, x, cfg,
                                                   kEtaLimit + 64 * static_cast<std::uint64_t>(m) + sn);
      result.failed_orbits += m == 0 ? 0 : e.cloud.meta().failed_orbits;
      result.table.add(n, "eta_vs_mu_m" + std::to_string(m), dict_distance(e.cloud, limits[k].cloud, dict),
                       e.noise + limits[k].noise, cfg.epsilon);
    }
  }
  if (any_monte_carlo) result.notes.push_back("depths above the enumeration cap used Monte Carlo fibers");

  const double slack = noise_floor(cfg.samples);
  for (const std::string& stat : result.table.statistics()) {
    const std::vector<DecayRow> rows = result.table.series(stat);
    std::vector<double> values;
    for (const DecayRow& r : rows) values.push_back(r.value);
    if (!non_increasing(values, slack)) {
      result.notes.push_back(stat + " increases by more than the noise floor");
      result.verdict = combine(result.verdict, Verdict::fail);
    }
    result.verdict = combine(result.verdict, below_threshold(rows.back().value, rows.back().noise_floor, cfg.epsilon));
  }
  result.headline = "eta_x_vs_eta_y";
  return result;
}

}  // namespace plab
