#include "plab/runner.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <thread>

#include "plab/errors.hpp"

namespace plab {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string utc_stamp(const char* format) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, format, &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifacts("missing " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw MissingArtifacts("unreadable " + path.string() + ": " + e.what());
  }
}

// A directory name not yet taken under `root`; creation is the claim.
fs::path claim_run_dir(const fs::path& root, const std::string& stem) {
  fs::create_directories(root);
  for (int k = 0;; ++k) {
    const fs::path candidate = root / (k == 0 ? stem : stem + "-" + std::to_string(k));
    if (fs::create_directory(candidate)) return candidate;
  }
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_';
  return out;
}

std::string entry_dir(std::size_t index, const ExperimentConfig& cfg) {
  return (index < 10 ? "0" : "") + std::to_string(index) + "-" + to_string(cfg.experiment);
}

void execute(const ExperimentConfig& cfg, const fs::path& run_dir, const fs::path& output, RunEntry& entry) {
  const fs::path dir = run_dir / entry.dir;
  const auto start = std::chrono::steady_clock::now();
  json doc{{"experiment", entry.experiment},
           {"config", json::parse(config_echo(cfg, output))},
           {"config_hash", config_hash(RunConfig{{cfg}, output})},
           {"seed", cfg.seed},
           {"artifact_version", kArtifactVersion}};
  try {
    fs::create_directory(dir);
    const ExperimentResult result = run_experiment(cfg);
    entry.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.table.write_csv(dir / "table.csv");
    entry.status = to_string(result.verdict);
    doc["verdict"] = entry.status;
    doc["notes"] = result.notes;
    doc["failed_orbits"] = result.failed_orbits;
    doc["headline"] = result.headline;
    doc["threshold"] = result.threshold;
    if (const auto last = result.table.last(result.headline)) doc["final_value"] = last->value;
  } catch (const std::exception& e) {
    entry.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    entry.status = "ERROR";
    entry.error = e.what();
    doc["verdict"] = "ERROR";
    doc["error"] = entry.error;
  }
  doc["wall_seconds"] = entry.wall_seconds;
  try {
    write_text(dir / "run.json", doc.dump(2) + "\n");
  } catch (const std::exception& e) {
    entry.status = "ERROR";
    entry.error = e.what();
  }
}

}  // namespace

int RunManifest::exit_code() const {
  if (!error.empty()) return 1;
  bool inconclusive = false;
  for (const RunEntry& e : entries) {
    if (e.status == "FAIL" || e.status == "ERROR") return 1;
    if (e.status == "INCONCLUSIVE") inconclusive = true;
  }
  return inconclusive ? 2 : 0;
}

std::string RunManifest::to_json() const {
  json runs = json::array();
  for (const RunEntry& e : entries) {
    json r{{"experiment", e.experiment}, {"dir", e.dir}, {"status", e.status}, {"wall_seconds", e.wall_seconds}};
    if (!e.error.empty()) r["error"] = e.error;
    runs.push_back(r);
  }
  json doc{{"config_hash", config_hash},
           {"seed", seed},
           {"artifact_version", artifact_version},
           {"dictionary_version", dictionary_version},
           {"started", started},
           {"finished", finished},
           {"dry_run", dry_run},
           {"runs", runs},
           {"exit_code", exit_code()}};
  if (!error.empty()) doc["error"] = error;
  return doc.dump(2) + "\n";
}

RunManifest dispatch(const RunConfig& run, const RunOptions& options) {
  if (run.experiments.empty()) throw ValidationError("experiments: the list is empty");
  RunManifest manifest;
  manifest.config_hash = config_hash(run);
  manifest.seed = run.experiments.front().seed;
  manifest.dictionary_version = run.experiments.front().dictionary;
  manifest.dry_run = options.dry_run;
  manifest.started = utc_stamp("%Y-%m-%dT%H:%M:%SZ");
  manifest.run_dir = claim_run_dir(run.output, utc_stamp("%Y%m%dT%H%M%SZ") + "-" + manifest.config_hash.substr(0, 12));

  for (std::size_t k = 0; k < run.experiments.size(); ++k) {
    const ExperimentConfig& cfg = run.experiments[k];
    manifest.entries.push_back({to_string(cfg.experiment), entry_dir(k, cfg), "PLANNED", "", 0.0});
  }
  write_text(manifest.run_dir / "config.json", config_echo(run) + "\n");

  if (!options.dry_run) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < run.experiments.size(); k = next++) {
        execute(run.experiments[k], manifest.run_dir, run.output, manifest.entries[k]);
      }
    };
    const std::size_t threads = std::clamp<std::size_t>(options.parallelism, 1, run.experiments.size());
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
  }
  manifest.finished = utc_stamp("%Y-%m-%dT%H:%M:%SZ");
  write_text(manifest.run_dir / "manifest.json", manifest.to_json());
  return manifest;
}

std::vector<fs::path> report(const fs::path& run_dir) {
  const json manifest = read_json(run_dir / "manifest.json");
  if (manifest.value("dry_run", false)) throw MissingArtifacts("dry run " + run_dir.string() + " has no tables");
  const fs::path out_dir = run_dir / "report";
  fs::create_directories(out_dir);
  std::vector<fs::path> written;

  std::ostringstream summary;
  summary << "run " << run_dir.filename().string() << "  config " << manifest.value("config_hash", "")
          << "  seed " << manifest.value("seed", 0ULL) << "\n\n";
  for (const json& entry : manifest.at("runs")) {
    const std::string name = entry.at("experiment");
    const std::string dir = entry.at("dir");
    const std::string status = entry.at("status");
    if (status == "ERROR") {
      summary << dir << "  ERROR  " << entry.value("error", "") << "\n";
      continue;
    }
    const json info = read_json(run_dir / dir / "run.json");
    const DecayTable table = DecayTable::read_csv(run_dir / dir / "table.csv");

    const fs::path target = out_dir / dir;
    fs::create_directories(target);
    for (const std::string& stat : table.statistics()) {
      std::string text = "n,value,bound,noise\n";
      for (const DecayRow& row : table.series(stat)) {
        text += std::to_string(row.n) + "," + format_number(row.value) + "," +
                (row.bound ? format_number(*row.bound) : "") + "," + format_number(row.noise_floor) + "\n";
      }
      const fs::path file = target / (sanitize(stat) + ".csv");
      write_text(file, text);
      written.push_back(file);
    }

    if (name == to_string(ExperimentKind::mixing)) {
      const std::size_t size = dictionary_by_version(manifest.value("dictionary_version", kDictionaryVersion)).size();
      std::vector<std::string> cells(size * size);
      int final_n = -1;
      for (const DecayRow& row : table.rows()) final_n = std::max(final_n, row.n);
      for (const DecayRow& row : table.rows()) {
        int a = 0, b = 0;
        if (row.n != final_n || std::sscanf(row.statistic.c_str(), "corr:%d:%d", &a, &b) != 2) continue;
        if (a >= 0 && b >= 0 && std::size_t(a) < size && std::size_t(b) < size) {
          cells[std::size_t(a) * size + std::size_t(b)] = format_number(std::abs(row.value));
        }
      }
      std::string text = "phi";
      for (std::size_t b = 0; b < size; ++b) text += ",psi" + std::to_string(b);
      text += "\n";
      for (std::size_t a = 0; a < size; ++a) {
        text += std::to_string(a);
        for (std::size_t b = 0; b < size; ++b) text += "," + cells[a * size + b];
        text += "\n";
      }
      const fs::path file = target / "pair_matrix.csv";
      write_text(file, text);
      written.push_back(file);
    }

    const std::string headline = info.value("headline", "");
    summary << dir << "  " << status << "  " << headline;
    if (const auto last = table.last(headline)) {
      summary << " final " << format_number(last->value) << " at n=" << last->n << " vs threshold "
              << format_number(info.value("threshold", 0.0));
    }
    summary << "\n";
    for (const auto& note : info.value("notes", std::vector<std::string>{})) summary << "    note: " << note << "\n";
  }
  const fs::path file = out_dir / "summary.txt";
  write_text(file, summary.str());
  written.push_back(file);
  return written;
}

}  // namespace plab
