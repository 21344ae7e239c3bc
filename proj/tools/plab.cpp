#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "plab/config.hpp"
#include "plab/errors.hpp"
#include "plab/green.hpp"
#include "plab/measures.hpp"
#include "plab/parallel.hpp"
#include "plab/rng.hpp"
#include "plab/runner.hpp"

namespace {

namespace fs = std::filesystem;
using namespace plab;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t parallelism = 1;
  bool dry_run = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_dry_run = true) {
  cmd->add_option("--config", c.config, "YAML config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Override the config seed");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--parallelism", c.parallelism, "Concurrent experiments / worker threads")->check(CLI::PositiveNumber);
  if (with_dry_run) cmd->add_flag("--dry-run", c.dry_run, "Write the planned manifest without computing");
}

// Config from --config (or defaults) with the seed override applied.
RunConfig load(const Common& c, std::optional<ExperimentKind> only) {
  RunConfig run;
  if (!c.config.empty()) {
    run = parse_config(c.config);
  } else {
    run.experiments.push_back(ExperimentConfig{});
  }
  if (only) {
    ExperimentConfig cfg = run.experiments.front();
    cfg.experiment = *only;
    validate(cfg);
    run.experiments = {cfg};
  }
  for (ExperimentConfig& cfg : run.experiments) {
    if (c.seed) cfg.seed = *c.seed;
  }
  if (!c.out.empty()) run.output = c.out;
  return run;
}

int dispatch_and_print(const RunConfig& run, const Common& c) {
  const RunManifest m = dispatch(run, {c.parallelism, c.dry_run});
  for (const RunEntry& e : m.entries) {
    std::cout << e.experiment << ": " << e.status;
    if (!e.error.empty()) std::cout << " (" << e.error << ")";
    std::cout << "\n";
  }
  std::cout << "run directory: " << m.run_dir.string() << "\n";
  return m.exit_code();
}

ProjectivePoint parse_point(const std::string& text) {
  if (text == "inf") return ProjectivePoint::infinity();
  double re = 0.0, im = 0.0;
  char comma = 0;
  std::istringstream in(text);
  in >> re;
  if (!in) throw InvalidConfig("point '" + text + "' is not re[,im] or inf");
  if (in >> comma) {
    if (comma != ',' || !(in >> im)) throw InvalidConfig("point '" + text + "' is not re[,im] or inf");
  }
  return ProjectivePoint::affine({re, im});
}

std::ostream& open_out(const std::string& dir, const std::string& name, std::ofstream& file) {
  if (dir.empty()) return std::cout;
  fs::create_directories(dir);
  file.open(fs::path(dir) / name);
  if (!file) throw IoError("cannot write " + (fs::path(dir) / name).string());
  return file;
}

int run_green(const Common& c, int stage, int points, double target, int length) {
  const ExperimentConfig cfg = load(c, std::nullopt).experiments.front();
  const MapSequence seq = family_sample(cfg.family, length, cfg.seed);
  const Cloud sample = sphere_uniform(static_cast<std::size_t>(points), derive_seed(cfg.seed, 11));
  std::ofstream file;
  std::ostream& out = open_out(c.out, "green.csv", file);
  out << "stage,re_z,im_z,chart,value,depth,tail_bound\n";
  int short_count = 0;
  for (const ProjectivePoint& p : sample.points()) {
    GreenValue g{};
    try {
      g = green_eval(seq, stage, p, target);
    } catch (const SequenceTooShort& e) {
      g = e.deepest();
      ++short_count;
    }
    const cplx v = p.chart_coordinate();
    out << stage << "," << format_number(v.real()) << "," << format_number(v.imag()) << "," << p.chart() << ","
        << format_number(g.value) << "," << g.depth << "," << format_number(g.tail_bound) << "\n";
  }
  if (short_count > 0) {
    std::cerr << short_count << " point(s) could not reach the target tail; deepest values reported\n";
  }
  return 0;
}

int run_sample(const Common& c, int stage, int depth, const std::string& x, std::size_t count, const std::string& mode) {
  const ExperimentConfig cfg = load(c, std::nullopt).experiments.front();
  const MapSequence seq = family_sample(cfg.family, stage + depth, cfg.seed);
  const ProjectivePoint base = parse_point(x);
  const Cloud cloud = mode == "exact" ? exact_fiber_measure(seq, stage, depth, base, cfg.cap)
                                      : backward_sample(seq, stage, depth, base, count, cfg.seed);
  const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
  fs::create_directories(dir);
  write_cloud_csv(cloud, dir / "cloud.csv");
  write_cloud_manifest(cloud, dir / "cloud.json");
  std::cout << "wrote " << cloud.size() << " points to " << (dir / "cloud.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for non-autonomous dynamics on the Riemann sphere"};
  app.require_subcommand(1);
  Common common;
  // Subcommand callbacks only pick the action; it runs after parsing so that
  // shared flags are applied first.
  std::function<int()> action;

  CLI::App* green = app.add_subcommand("green", "Evaluate Green functions at sphere-uniform points (CSV)");
  add_common(green, common, false);
  int green_stage = 0, green_points = 16, green_length = 64;
  double green_target = 1e-6;
  green->add_option("--stage", green_stage, "Stage i")->check(CLI::NonNegativeNumber);
  green->add_option("--points", green_points, "Number of evaluation points")->check(CLI::PositiveNumber);
  green->add_option("--target", green_target, "Target tail bound")->check(CLI::PositiveNumber);
  green->add_option("--length", green_length, "Sequence length")->check(CLI::PositiveNumber);
  green->callback([&] {
    action = [&] { return run_green(common, green_stage, green_points, green_target, green_length); };
  });

  CLI::App* sample = app.add_subcommand("sample", "Write a preimage cloud (exact or Monte Carlo)");
  add_common(sample, common, false);
  int sample_stage = 0, sample_depth = 10;
  std::string sample_x = "2", sample_mode = "mc";
  std::size_t sample_count = 10000;
  sample->add_option("--stage", sample_stage, "Target stage m")->check(CLI::NonNegativeNumber);
  sample->add_option("--depth", sample_depth, "Depth n")->check(CLI::NonNegativeNumber);
  sample->add_option("--x", sample_x, "Base point re[,im] or inf (at stage m+n)");
  sample->add_option("--count", sample_count, "Monte Carlo orbit count")->check(CLI::PositiveNumber);
  sample->add_option("--mode", sample_mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
  sample->callback([&] {
    action = [&] { return run_sample(common, sample_stage, sample_depth, sample_x, sample_count, sample_mode); };
  });

  for (ExperimentKind kind : all_experiments()) {
    CLI::App* cmd = app.add_subcommand(to_string(kind), "Run the " + to_string(kind) + " experiment");
    add_common(cmd, common);
    cmd->callback([&, kind] {
      action = [&, kind] { return dispatch_and_print(load(common, kind), common); };
    });
  }

  CLI::App* report_cmd = app.add_subcommand("report", "Write plot-ready files for a run directory");
  std::string run_dir;
  report_cmd->add_option("run_dir", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  report_cmd->callback([&] {
    action = [&] {
      const std::vector<fs::path> written = report(run_dir);
      std::cout << "wrote " << written.size() << " files under " << (fs::path(run_dir) / "report").string() << "\n";
      std::ifstream summary(fs::path(run_dir) / "report" / "summary.txt");
      std::cout << summary.rdbuf();
      return 0;
    };
  });

  CLI::App* run_cmd = app.add_subcommand("run", "Run every experiment listed in a config");
  add_common(run_cmd, common);
  run_cmd->get_option("--config")->required();
  run_cmd->callback([&] {
    action = [&] { return dispatch_and_print(load(common, std::nullopt), common); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  set_worker_threads(common.parallelism);
  try {
    return action();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
