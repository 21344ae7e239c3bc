// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "plab/dictionary.hpp"
#include "plab/experiments.hpp"
#include "plab/green.hpp"
#include "plab/measures.hpp"
#include "plab/parallel.hpp"
#include "plab/rng.hpp"

using namespace plab;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

MapSequence squares(int n) { return MapSequence(std::vector<MapLift>(static_cast<std::size_t>(n), MapLift::power(2))); }

ProjectivePoint random_point(Rng& rng) { return {uniform_disc(rng, 1.0), uniform_disc(rng, 1.0)}; }

FamilySpec quadratics() {
  FamilySpec spec;
  spec.degrees = {2};
  return spec;
}

FamilySpec mixed_degrees() {
  FamilySpec spec;
  spec.degrees = {2, 3};
  return spec;
}

ExperimentConfig square_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  cfg.family.kind = FamilyKind::explicit_list;
  cfg.family.maps = {MapLift::power(2)};
  cfg.reference = ReferenceKind::unit_circle;
  return cfg;
}

Outcome green_closed_form() {
  const auto start = Clock::now();
  const MapSequence seq = squares(24);
  Rng rng(101);
  int violations = 0;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const cplx a = uniform_disc(rng, 4.0), b = uniform_disc(rng, 4.0);
    const double exact = std::log(std::max(std::abs(a), std::abs(b)));
    for (int n = 4; n <= 20; ++n) {
      const GreenValue g = green_at_depth(seq, 0, n, a, b);
      const double err = std::abs(g.value - exact);
      worst = std::max(worst, err / g.tail_bound);
      if (err > g.tail_bound) ++violations;
    }
  }
  const double t = seconds_since(start);
  return {violations == 0 && t < 1.0,
          fmt("%d violations over 1000 points x depths 4..20, worst err/tail %.3g, %.2f s", violations, worst, t)};
}

Outcome cauchy_bound() {
  Rng rng(102);
  const int deepest = 30;
  long violations = 0, checks = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const MapSequence seq = family_sample(mixed_degrees(), deepest + 2, 1000 + s);
    for (int k = 0; k < 1000; ++k) {
      const ProjectivePoint z = random_point(rng);
      const std::vector<double> g = green_series(seq, 0, z.z(), z.w(), deepest);
      for (int n = 0; n < deepest; ++n) {
        const double bound = green_tail_bound(seq, 0, n);
        for (int m = n + 1; m <= deepest; ++m) {
          const double gap = std::abs(g[std::size_t(m)] - g[std::size_t(n)]);
          worst = std::max(worst, gap / bound);
          ++checks;
          if (gap > bound) ++violations;
        }
      }
    }
  }
  return {violations == 0,
          fmt("%ld violations in %ld (m, n) pairs over 20 sequences x 1000 points, worst gap/bound %.3g", violations,
              checks, worst)};
}

Outcome pullback_identity() {
  Rng rng(103);
  std::vector<MapSequence> seqs;
  for (std::uint64_t s = 0; s < 20; ++s) seqs.push_back(family_sample(mixed_degrees(), 24, 2000 + s));
  int violations = 0;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const MapSequence& seq = seqs[uniform_index(rng, seqs.size())];
    const int stage = 1 + static_cast<int>(uniform_index(rng, 6));
    const PullbackCheck c = check_pullback(seq, stage, random_point(rng), 14);
    worst = std::max(worst, c.residual / c.bound);
    if (!(c.residual <= c.bound)) ++violations;
  }
  return {violations == 0, fmt("%d violations in 1000 triples, worst residual/bound %.3g", violations, worst)};
}

Outcome exact_equidistribution() {
  const auto start = Clock::now();
  const MapSequence seq = squares(12);
  const Cloud fib = exact_fiber_measure(seq, 0, 12, ProjectivePoint(2.0, 1.0));
  const double d = dict_distance(fib, reference_circle(1.0, 4096));
  const double t = seconds_since(start);
  return {d < 0.02 && t < 10.0 && fib.size() == 4096,
          fmt("%zu roots, dict_distance %.3g (< 0.02), %.2f s", fib.size(), d, t)};
}

Outcome monte_carlo_agreement() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const MapSequence seq = family_sample(quadratics(), 20, 3000 + s);
    const ProjectivePoint x = select_base_points(seq, {12}, 1, 0.05, 1, s)[0];
    const Cloud exact = exact_fiber_measure(seq, 0, 12, x);
    const Cloud mc = backward_sample(seq, 0, 12, x, 100000, 4000 + s);
    worst = std::max(worst, dict_distance(exact, mc));
  }
  return {worst <= 0.02, fmt("worst dict_distance over 5 sequences %.3g (<= 0.02)", worst)};
}

Outcome equidistribution_decay() {
  const auto start = Clock::now();
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::equidistribution;
  cfg.seed = 7;
  cfg.depths = {4, 5, 6, 7, 8, 9, 10, 11, 12};
  const ExperimentResult r = run_equidistribution(cfg);
  const double slack = 3.0 / std::sqrt(double(cfg.samples));
  bool ok = true;
  std::string detail;
  for (const std::string& stat : r.table.statistics()) {
    const std::vector<DecayRow> rows = r.table.series(stat);
    double rise = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k) rise = std::max(rise, rows[k].value - rows[k - 1].value);
    ok = ok && rise <= slack && rows.back().value < 0.05;
    detail += fmt("%s final %.3g, largest rise %.3g; ", stat.c_str(), rows.back().value, rise);
  }
  const double t = seconds_since(start);
  ok = ok && t < 120.0 && r.table.statistics().size() == 2;
  return {ok, detail + fmt("noise floor %.3g, %.1f s", slack, t)};
}

Outcome invariance() {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::invariance;
  cfg.stages = {1, 2, 3, 4, 5};
  cfg.samples = 100000;
  const ExperimentResult r = run_invariance(cfg);
  double worst = 0.0;
  for (const DecayRow& row : r.table.series("residual")) worst = std::max(worst, row.value);
  return {worst < 0.03 && r.table.series("residual").size() == 5,
          fmt("worst residual over stages 1..5 %.3g (< 0.03), verdict %s", worst, to_string(r.verdict).c_str())};
}

Outcome mixing_decay() {
  std::string detail;
  bool ok = true;
  for (std::uint64_t s = 0; s < 3; ++s) {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::mixing;
    cfg.seed = 5000 + s;
    cfg.depths = {1, 2, 4, 6, 8};
    const ExperimentResult r = run_mixing(cfg);
    const double final_corr = r.table.last("max_abs_corr")->value;
    ok = ok && final_corr < 0.05;
    detail += fmt("seed %llu max|C_8| %.3g; ", (unsigned long long)cfg.seed, final_corr);
  }
  ExperimentConfig cfg = square_config(ExperimentKind::mixing);
  cfg.depths = {1, 2, 3, 4, 5, 6, 7, 8};
  cfg.pairs = {{1, 1}, {2, 2}};
  const ExperimentResult r = run_mixing(cfg);
  const double noise = 3.0 / std::sqrt(double(cfg.samples));
  double worst = 0.0;
  for (const char* stat : {"corr:1:1", "corr:2:2"}) {
    for (const DecayRow& row : r.table.series(stat)) worst = std::max(worst, std::abs(row.value));
  }
  ok = ok && worst <= noise;
  return {ok, detail + fmt("z^2 scaled coordinates max|C_n| %.3g (<= %.3g)", worst, noise)};
}

Outcome corollary() {
  ExperimentConfig cfg = square_config(ExperimentKind::corollary);
  cfg.depths = {4, 8, 12};
  const ExperimentResult uniform = run_corollary(cfg);
  const double d = uniform.table.last("distance_to_equilibrium")->value;
  cfg.source.kind = SourceKind::pole;
  const ExperimentResult pole = run_corollary(cfg);
  return {d < 0.05 && pole.verdict == Verdict::expected_fail,
          fmt("sphere-uniform distance at n=12 %.3g (< 0.05); pole source %s", d, to_string(pole.verdict).c_str())};
}

Outcome counterexample() {
  ExperimentConfig cfg = square_config(ExperimentKind::counterexample);
  cfg.stages = {1, 2, 3, 4, 5};
  const ExperimentResult r = run_counterexample(cfg);
  double residual = 0.0, separation = 1e300;
  for (const DecayRow& row : r.table.series("pushforward_residual")) residual = std::max(residual, row.value);
  for (const DecayRow& row : r.table.series("distance_to_equilibrium")) separation = std::min(separation, row.value);
  return {residual <= 1e-9 && separation > 0.3 && r.table.series("distance_to_equilibrium").size() == 5,
          fmt("worst pushforward residual %.3g (<= 1e-9), closest distance to equilibrium %.3g (> 0.3)", residual,
              separation)};
}

Outcome branch_diameters() {
  ExperimentConfig cfg = square_config(ExperimentKind::branch_diameters);
  cfg.depths = {2, 3, 4, 5, 6, 7, 8};
  const ExperimentResult r = run_branch_diameters(cfg);
  double worst_ratio = 0.0, worst_tracked = 1.0;
  for (const DecayRow& row : r.table.series("fit_ratio")) worst_ratio = std::max(worst_ratio, row.value);
  for (const DecayRow& row : r.table.series("tracked_fraction")) worst_tracked = std::min(worst_tracked, row.value);
  // Least-squares slope of log diameter against log d(n), for the record.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto rows = r.table.series("quantile_diameter");
  for (const DecayRow& row : rows) {
    const double x = row.n * std::log(2.0), y = std::log(row.value);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double k = double(rows.size());
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return {worst_ratio <= 2.0 && worst_tracked >= 0.95 && rows.size() == 7,
          fmt("worst diameter/(c/sqrt d) %.3g (<= 2), worst tracked fraction %.3g (>= 0.95), decay exponent %.3f",
              worst_ratio, worst_tracked, slope)};
}

Outcome determinism() {
  std::string mismatched;
  for (ExperimentKind kind : all_experiments()) {
    ExperimentConfig cfg;
    cfg.experiment = kind;
    cfg.samples = 5000;
    cfg.build_depth = 12;
    cfg.depths = {2, 4, 6};
    cfg.stages = {1, 2};
    cfg.delta_levels = 6;
    if (kind == ExperimentKind::counterexample || kind == ExperimentKind::branch_diameters) {
      cfg = square_config(kind);
      cfg.samples = 5000;
      cfg.depths = {2, 3, 4};
      cfg.stages = {1, 2};
    }
    set_worker_threads(1);
    const std::string a = run_experiment(cfg).table.to_csv();
    set_worker_threads(4);
    const std::string b = run_experiment(cfg).table.to_csv();
    if (a != b || a.empty()) mismatched += " " + to_string(kind);
  }
  set_worker_threads(0);
  return {mismatched.empty(), mismatched.empty() ? "all 7 experiments byte-identical across reruns (1 and 4 threads)"
                                                 : "mismatch:" + mismatched};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"Green closed form for z^2", green_closed_form},
      {"certified Cauchy bound", cauchy_bound},
      {"pullback identity", pullback_identity},
      {"exact equidistribution for z^2", exact_equidistribution},
      {"Monte Carlo agrees with exact fibers", monte_carlo_agreement},
      {"equidistribution decay", equidistribution_decay},
      {"invariance", invariance},
      {"mixing decay", mixing_decay},
      {"corollary", corollary},
      {"counterexample", counterexample},
      {"branch diameters", branch_diameters},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o{false, ""};
    const auto start = Clock::now();
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] criterion %zu: %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                o.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
