#include <algorithm>

#include "internal.hpp"

namespace plab {

using namespace detail;

// C_n(phi, psi) = int (phi o P(n)) psi dmu_0 - int phi dmu_n int psi dmu_0,
// the first integral taken over mu_0's points pushed through P(n).
ExperimentResult run_mixing(const ExperimentConfig& cfg) {
  require(!cfg.depths.empty(), "mixing needs a depth schedule");
  require(cfg.depths.front() >= 0, "depths must be nonnegative");
  const TestDictionary& dict = dictionary_by_version(cfg.dictionary);
  const int size = static_cast<int>(dict.size());
  std::vector<std::pair<int, int>> pairs = cfg.pairs;
  if (pairs.empty()) {
    for (int a = 0; a < size; ++a) {
      for (int b = 0; b < size; ++b) pairs.emplace_back(a, b);
    }
  }
  for (auto [a, b] : pairs) {
    require(a >= 0 && a < size && b >= 0 && b < size, "mixing pair index outside the dictionary");
  }

  const int max_n = cfg.depths.back();
  const MapSequence seq = build_sequence(cfg, max_n + cfg.build_depth);
  std::vector<int> guarded;
  for (int n : cfg.depths) guarded.push_back(n + cfg.build_depth);
  std::vector<ProjectivePoint> base = cfg.base_points;
  if (base.empty()) base = select_base_points(seq, guarded, cfg.window, cfg.delta, 1, cfg.seed);

  ExperimentResult result{ExperimentKind::mixing, {}, Verdict::pass, {}, 0, cfg.seed, "max_abs_corr", cfg.epsilon};
  const Cloud mu0 = backward_sample(seq, 0, cfg.build_depth, base[0], cfg.samples,
                                    derive_seed(cfg.seed, kMixingZero));
  result.failed_orbits += mu0.meta().failed_orbits;
  const std::vector<double> psi_integrals = dict.integrals(mu0);

  const std::size_t count = mu0.size();
  const auto ds = static_cast<std::size_t>(size);
  std::vector<double> psi_values(count * ds);
  for (std::size_t k = 0; k < count; ++k) {
    dict.evaluate(mu0.points()[k], std::span(psi_values).subspan(k * ds, ds));
  }

  std::vector<ProjectivePoint> images = mu0.points();
  int image_stage = 0;
  const double noise = noise_floor(cfg.samples);
  std::vector<double> phi_values(ds);
  std::vector<double> joint(ds * ds);
  for (int n : cfg.depths) {
    for (; image_stage < n; ++image_stage) {
      for (ProjectivePoint& p : images) p = apply(seq.lift(image_stage + 1), p).point;
    }
    const Cloud mun = backward_sample(seq, n, cfg.build_depth, base[0], cfg.samples,
                                      derive_seed(cfg.seed, kMixingStage + static_cast<std::uint64_t>(n)));
    result.failed_orbits += mun.meta().failed_orbits;
    const std::vector<double> phi_integrals = dict.integrals(mun);

    std::ranges::fill(joint, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
      dict.evaluate(images[k], phi_values);
      const double w = mu0.weights()[k];
      const double* psi = &psi_values[k * ds];
      for (std::size_t a = 0; a < ds; ++a) {
        const double wa = w * phi_values[a];
        for (std::size_t b = 0; b < ds; ++b) joint[a * ds + b] += wa * psi[b];
      }
    }
    double worst = 0.0;
    for (auto [a, b] : pairs) {
      const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
      const double corr = joint[ua * ds + ub] - phi_integrals[ua] * psi_integrals[ub];
      worst = std::max(worst, std::abs(corr));
      result.table.add(n, "corr:" + std::to_string(a) + ":" + std::to_string(b), corr, noise);
    }
    result.table.add(n, "max_abs_corr", worst, noise, cfg.epsilon);
  }
  const DecayRow final_row = *result.table.last("max_abs_corr");
  result.verdict = below_threshold(final_row.value, final_row.noise_floor, cfg.epsilon);
  return result;
}

}  // namespace plab
