#include "plab/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "plab/errors.hpp"

namespace plab {

namespace {

using json = nlohmann::json;

std::string where(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.line < 0) return "";
  return " (line " + std::to_string(mark.line + 1) + ")";
}

[[noreturn]] void bad(const YAML::Node& node, const std::string& key, const std::string& what) {
  throw ParseError("key '" + key + "'" + where(node) + ": " + what);
}

void check_keys(const YAML::Node& map, const std::string& path, const std::set<std::string>& allowed) {
  if (!map.IsMap()) bad(map, path, "expected a mapping");
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    const std::string full = path.empty() ? key : path + "." + key;
    if (!allowed.contains(key)) throw ParseError("unknown key '" + full + "'" + where(kv.first));
  }
}

double real_value(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) bad(n, key, "expected a number");
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    bad(n, key, "'" + n.Scalar() + "' is not a number");
  }
}

long long integer_value(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) bad(n, key, "expected an integer");
  try {
    return n.as<long long>();
  } catch (const YAML::Exception&) {
    // Accept integral floating forms such as 1e5.
    const double v = real_value(n, key);
    if (std::trunc(v) != v || std::abs(v) > 9.0e15) bad(n, key, "'" + n.Scalar() + "' is not an integer");
    return static_cast<long long>(v);
  }
}

std::uint64_t unsigned_value(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) bad(n, key, "expected a nonnegative integer");
  try {
    return n.as<std::uint64_t>();
  } catch (const YAML::Exception&) {
    const long long v = integer_value(n, key);
    if (v < 0) bad(n, key, "must be nonnegative");
    return static_cast<std::uint64_t>(v);
  }
}

std::string string_value(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) bad(n, key, "expected a string");
  return n.Scalar();
}

cplx complex_value(const YAML::Node& n, const std::string& key) {
  if (n.IsScalar()) return real_value(n, key);
  if (n.IsSequence() && n.size() == 2) return {real_value(n[0], key), real_value(n[1], key)};
  bad(n, key, "expected a number or [re, im]");
}

std::vector<cplx> complex_list(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) bad(n, key, "expected a list of coefficients");
  std::vector<cplx> out;
  for (const auto& item : n) out.push_back(complex_value(item, key));
  return out;
}

template <typename F>
auto list_of(const YAML::Node& n, const std::string& key, F&& item) {
  if (!n.IsSequence()) bad(n, key, "expected a list");
  std::vector<decltype(item(n, key))> out;
  for (const auto& x : n) out.push_back(item(x, key));
  return out;
}

ProjectivePoint point_value(const YAML::Node& n, const std::string& key) {
  if (n.IsScalar() && n.Scalar() == "inf") return ProjectivePoint::infinity();
  if (n.IsMap()) {
    check_keys(n, key, {"z", "w"});
    if (!n["z"] || !n["w"]) bad(n, key, "a homogeneous point needs both z and w");
    try {
      return {complex_value(n["z"], key + ".z"), complex_value(n["w"], key + ".w")};
    } catch (const ZeroVector&) {
      bad(n, key, "(0, 0) is not a point");
    }
  }
  return ProjectivePoint::affine(complex_value(n, key));
}

MapLift map_value(const YAML::Node& n, const std::string& key) {
  check_keys(n, key, {"p1", "p2", "power"});
  try {
    if (n["power"]) {
      if (n["p1"] || n["p2"]) bad(n, key, "give either power or p1/p2");
      return MapLift::power(static_cast<int>(integer_value(n["power"], key + ".power")));
    }
    if (!n["p1"] || !n["p2"]) bad(n, key, "a map needs p1 and p2");
    return {BinaryForm(complex_list(n["p1"], key + ".p1")), BinaryForm(complex_list(n["p2"], key + ".p2"))};
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError("map at " + key + where(n) + ": " + e.what());
  }
}

void parse_family(const YAML::Node& n, FamilySpec& family) {
  check_keys(n, "family", {"kind", "degrees", "radius", "maps"});
  if (n["kind"]) {
    try {
      family.kind = family_kind_from_string(string_value(n["kind"], "family.kind"));
    } catch (const InvalidSpec& e) {
      bad(n["kind"], "family.kind", e.what());
    }
  }
  if (n["degrees"]) {
    family.degrees = list_of(n["degrees"], "family.degrees",
                             [](const YAML::Node& x, const std::string& k) { return int(integer_value(x, k)); });
  }
  if (n["radius"]) family.radius = real_value(n["radius"], "family.radius");
  if (n["maps"]) family.maps = list_of(n["maps"], "family.maps", map_value);
}

std::vector<int> int_list(const YAML::Node& n, const std::string& key) {
  return list_of(n, key, [](const YAML::Node& x, const std::string& k) { return int(integer_value(x, k)); });
}

const std::set<std::string> kTopKeys{
    "family", "depths", "samples", "seed", "experiments", "thresholds", "output", "base_points",
    "window", "delta", "dictionary", "m_values", "build_depth", "stages", "reference", "disc",
    "branch_c", "cap", "pairs", "delta_levels", "circle_points", "source"};

RunConfig parse_document(const YAML::Node& root) {
  if (!root.IsMap()) throw ParseError("config must be a mapping of keys");
  check_keys(root, "", kTopKeys);

  ExperimentConfig base;
  RunConfig run;
  if (root["family"]) parse_family(root["family"], base.family);
  if (root["depths"]) base.depths = int_list(root["depths"], "depths");
  if (root["samples"]) {
    const long long s = integer_value(root["samples"], "samples");
    if (s < 1) bad(root["samples"], "samples", "must be positive");
    base.samples = static_cast<std::size_t>(s);
  }
  if (root["seed"]) base.seed = unsigned_value(root["seed"], "seed");
  if (root["thresholds"]) {
    check_keys(root["thresholds"], "thresholds", {"epsilon"});
    if (root["thresholds"]["epsilon"]) base.epsilon = real_value(root["thresholds"]["epsilon"], "thresholds.epsilon");
  }
  if (root["output"]) run.output = string_value(root["output"], "output");
  if (root["base_points"]) base.base_points = list_of(root["base_points"], "base_points", point_value);
  if (root["window"]) base.window = static_cast<int>(integer_value(root["window"], "window"));
  if (root["delta"]) base.delta = real_value(root["delta"], "delta");
  if (root["dictionary"]) base.dictionary = string_value(root["dictionary"], "dictionary");
  if (root["m_values"]) base.m_values = int_list(root["m_values"], "m_values");
  if (root["build_depth"]) base.build_depth = static_cast<int>(integer_value(root["build_depth"], "build_depth"));
  if (root["stages"]) base.stages = int_list(root["stages"], "stages");
  if (root["reference"]) {
    try {
      base.reference = reference_from_string(string_value(root["reference"], "reference"));
    } catch (const InvalidConfig& e) {
      bad(root["reference"], "reference", e.what());
    }
  }
  if (const YAML::Node disc = root["disc"]) {
    check_keys(disc, "disc", {"center", "radius"});
    if (disc["center"]) base.disc_center = complex_value(disc["center"], "disc.center");
    if (disc["radius"]) base.disc_radius = real_value(disc["radius"], "disc.radius");
  }
  if (root["branch_c"] && !root["branch_c"].IsNull()) base.branch_c = real_value(root["branch_c"], "branch_c");
  if (root["cap"]) base.cap = unsigned_value(root["cap"], "cap");
  if (root["pairs"]) {
    base.pairs = list_of(root["pairs"], "pairs", [](const YAML::Node& x, const std::string& k) {
      if (!x.IsSequence() || x.size() != 2) bad(x, k, "each pair is [phi, psi]");
      return std::pair<int, int>(int(integer_value(x[0], k)), int(integer_value(x[1], k)));
    });
  }
  if (root["delta_levels"]) base.delta_levels = static_cast<int>(integer_value(root["delta_levels"], "delta_levels"));
  if (root["circle_points"]) {
    base.circle_points = static_cast<std::size_t>(unsigned_value(root["circle_points"], "circle_points"));
  }
  if (const YAML::Node src = root["source"]) {
    check_keys(src, "source", {"kind", "center", "radius", "count"});
    if (src["kind"]) {
      try {
        base.source.kind = source_from_string(string_value(src["kind"], "source.kind"));
      } catch (const InvalidConfig& e) {
        bad(src["kind"], "source.kind", e.what());
      }
    }
    if (src["center"]) base.source.center = complex_value(src["center"], "source.center");
    if (src["radius"]) base.source.radius = real_value(src["radius"], "source.radius");
    if (src["count"]) base.source.count = static_cast<std::size_t>(unsigned_value(src["count"], "source.count"));
  }

  if (!root["experiments"]) throw ParseError("key 'experiments' is required");
  const std::vector<std::string> names =
      list_of(root["experiments"], "experiments",
              [](const YAML::Node& x, const std::string& k) { return string_value(x, k); });
  if (names.empty()) throw ValidationError("experiments: the list is empty");
  for (std::size_t k = 0; k < names.size(); ++k) {
    ExperimentConfig cfg = base;
    try {
      cfg.experiment = experiment_from_string(names[k]);
    } catch (const InvalidConfig& e) {
      bad(root["experiments"][k], "experiments", e.what());
    }
    validate(cfg);
    run.experiments.push_back(std::move(cfg));
  }
  return run;
}

void check_schedule(const std::vector<int>& values, const std::string& key) {
  if (values.empty()) throw ValidationError(key + ": schedule is empty");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] < 0) throw ValidationError(key + ": entries must be nonnegative");
    if (k > 0 && values[k] <= values[k - 1]) throw ValidationError(key + ": must be strictly increasing");
  }
}

bool uses_monte_carlo(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::equidistribution:
    case ExperimentKind::invariance:
    case ExperimentKind::mixing:
    case ExperimentKind::critical_mass: return true;
    case ExperimentKind::corollary:
    case ExperimentKind::counterexample: return cfg.reference == ReferenceKind::monte_carlo;
    case ExperimentKind::branch_diameters: return false;
  }
  return true;
}

json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

json point_json(const ProjectivePoint& p) {
  return json{{"z", complex_json(p.z())}, {"w", complex_json(p.w())}};
}

json form_json(const BinaryForm& f) {
  json out = json::array();
  for (cplx c : f.coefficients()) out.push_back(complex_json(c));
  return out;
}

json options_json(const ExperimentConfig& cfg) {
  json family{{"kind", to_string(cfg.family.kind)}, {"degrees", cfg.family.degrees}, {"radius", cfg.family.radius}};
  json maps = json::array();
  for (const MapLift& m : cfg.family.maps) maps.push_back({{"p1", form_json(m.p1())}, {"p2", form_json(m.p2())}});
  family["maps"] = maps;

  json base_points = json::array();
  for (const ProjectivePoint& p : cfg.base_points) base_points.push_back(point_json(p));
  json pairs = json::array();
  for (auto [a, b] : cfg.pairs) pairs.push_back({a, b});

  json doc{
      {"family", family},
      {"depths", cfg.depths},
      {"samples", cfg.samples},
      {"seed", cfg.seed},
      {"thresholds", {{"epsilon", cfg.epsilon}}},
      {"base_points", base_points},
      {"window", cfg.window},
      {"delta", cfg.delta},
      {"dictionary", cfg.dictionary},
      {"m_values", cfg.m_values},
      {"build_depth", cfg.build_depth},
      {"stages", cfg.stages},
      {"reference", to_string(cfg.reference)},
      {"disc", {{"center", complex_json(cfg.disc_center)}, {"radius", cfg.disc_radius}}},
      {"cap", cfg.cap},
      {"pairs", pairs},
      {"delta_levels", cfg.delta_levels},
      {"circle_points", cfg.circle_points},
      {"source",
       {{"kind", to_string(cfg.source.kind)},
        {"center", complex_json(cfg.source.center)},
        {"radius", cfg.source.radius},
        {"count", cfg.source.count}}},
  };
  doc["branch_c"] = cfg.branch_c ? json(*cfg.branch_c) : json(nullptr);
  return doc;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  check_schedule(cfg.depths, "depths");
  check_schedule(cfg.stages, "stages");
  if (cfg.m_values.empty()) throw ValidationError("m_values: list is empty");
  for (int m : cfg.m_values) {
    if (m < 0) throw ValidationError("m_values: entries must be nonnegative");
  }
  if (uses_monte_carlo(cfg) && cfg.samples < 1000) {
    throw ValidationError("samples: Monte Carlo experiments need at least 1000 samples");
  }
  if (cfg.window < 1) throw ValidationError("window: must be at least 1");
  if (!(cfg.delta > 0.0) || !std::isfinite(cfg.delta)) throw ValidationError("delta: must be positive");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw ValidationError("thresholds.epsilon: must lie in (0, 1)");
  if (cfg.build_depth < 1) throw ValidationError("build_depth: must be positive");
  if (cfg.cap < 1) throw ValidationError("cap: must be positive");
  if (cfg.delta_levels < 1 || cfg.delta_levels > 60) throw ValidationError("delta_levels: must lie in 1..60");
  if (cfg.circle_points < 2) throw ValidationError("circle_points: must be at least 2");
  if (!(cfg.disc_radius > 0.0)) throw ValidationError("disc.radius: must be positive");
  if (cfg.branch_c && !(*cfg.branch_c > 0.0)) throw ValidationError("branch_c: must be positive");
  if (cfg.source.count < 1) throw ValidationError("source.count: must be positive");
  if (!(cfg.source.radius > 0.0)) throw ValidationError("source.radius: must be positive");

  std::size_t dict_size = 0;
  try {
    dict_size = dictionary_by_version(cfg.dictionary).size();
  } catch (const InvalidConfig& e) {
    throw ValidationError(std::string("dictionary: ") + e.what());
  }
  for (auto [a, b] : cfg.pairs) {
    if (a < 0 || b < 0 || std::size_t(a) >= dict_size || std::size_t(b) >= dict_size) {
      throw ValidationError("pairs: index outside the dictionary");
    }
  }

  const FamilySpec& f = cfg.family;
  if (f.kind == FamilyKind::explicit_list) {
    if (f.maps.empty()) throw ValidationError("family.maps: explicit-list needs at least one map");
  } else {
    if (f.degrees.empty()) throw ValidationError("family.degrees: list is empty");
    for (int d : f.degrees) {
      if (d < 2 || d > 16) throw ValidationError("family.degrees: degrees must lie in 2..16");
    }
    if (!(f.radius >= 0.0) || !std::isfinite(f.radius)) {
      throw ValidationError("family.radius: must be finite and nonnegative");
    }
  }
}

RunConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError("malformed config (line " + std::to_string(e.mark.line + 1) + "): " + e.msg);
  }
  return parse_document(root);
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string config_echo(const ExperimentConfig& cfg, const std::filesystem::path& output) {
  json doc = options_json(cfg);
  doc["experiments"] = json::array({to_string(cfg.experiment)});
  doc["output"] = output.string();
  return doc.dump(2);
}

std::string config_echo(const RunConfig& run) {
  if (run.experiments.empty()) throw ValidationError("experiments: the list is empty");
  json doc = options_json(run.experiments.front());
  const json shared = doc;
  json names = json::array();
  for (const ExperimentConfig& cfg : run.experiments) {
    if (options_json(cfg) != shared) throw ValidationError("experiments in one run must share their options");
    names.push_back(to_string(cfg.experiment));
  }
  doc["experiments"] = names;
  doc["output"] = run.output.string();
  return doc.dump(2);
}

std::string config_hash(const RunConfig& run) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : json::parse(config_echo(run)).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace plab
