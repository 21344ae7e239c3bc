#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "plab/config.hpp"

namespace plab {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunOptions {
  std::size_t parallelism = 1;
  bool dry_run = false;
};

struct RunEntry {
  std::string experiment;
  /// Directory of this experiment's artifacts, relative to the run dir.
  std::string dir;
  /// PASS, FAIL, INCONCLUSIVE, EXPECTED-FAIL, ERROR or PLANNED.
  std::string status;
  std::string error;
  double wall_seconds = 0.0;
};

struct RunManifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string artifact_version = kArtifactVersion;
  std::string dictionary_version;
  std::string started;
  std::string finished;
  bool dry_run = false;
  std::vector<RunEntry> entries;
  std::filesystem::path run_dir;
  std::string error;

  /// 1 on any FAIL or error, else 2 on any INCONCLUSIVE, else 0.
  int exit_code() const;
  std::string to_json() const;
};

/// Runs every configured experiment under <output>/<timestamp>-<hash>/ (a
/// fresh directory; existing ones are never reused), writing table.csv and
/// run.json per experiment and manifest.json for the run. Experiments run
/// concurrently up to `parallelism`. The manifest is written even when
/// experiments fail.
RunManifest dispatch(const RunConfig& run, const RunOptions& options = {});

/// Writes plot-ready files under <run_dir>/report/: one CSV per statistic
/// with columns n,value,bound,noise, a 17x17 matrix of final |C_n| for
/// mixing runs, and summary.txt. Returns the written paths. Throws
/// MissingArtifacts when the manifest or a table is absent.
std::vector<std::filesystem::path> report(const std::filesystem::path& run_dir);

}  // namespace plab
