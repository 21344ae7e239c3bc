#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "plab/experiments.hpp"

namespace plab {

/// A parsed config file: one ExperimentConfig per listed experiment, all
/// sharing the same family and options.
struct RunConfig {
  std::vector<ExperimentConfig> experiments;
  std::filesystem::path output = "runs";
};

/// Strict YAML parsing; unknown keys are errors. Accepted keys:
///   family: {kind, degrees, radius, maps: [{p1: [...], p2: [...]}]}
///   depths, samples, seed, experiments, thresholds: {epsilon}, output,
///   base_points, window, delta, dictionary, m_values, build_depth, stages,
///   reference, disc: {center, radius}, branch_c, cap, pairs, delta_levels,
///   circle_points, source: {kind, center, radius, count}
/// Complex numbers are written as a number or as [re, im]; points as a
/// complex affine value or the string "inf". Map coefficients list c_0..c_d
/// for sum_j c_j Z^j W^(d-j).
/// Throws ParseError (malformed text, unknown keys, wrong types; messages
/// carry the key path and line) or ValidationError (broken invariants).
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);

/// Re-checks every invariant; throws ValidationError.
void validate(const ExperimentConfig& cfg);

/// JSON document (also valid config text) that parses back to `cfg`.
std::string config_echo(const ExperimentConfig& cfg, const std::filesystem::path& output = "runs");
/// The whole config set as one document.
std::string config_echo(const RunConfig& run);

/// FNV-1a over the canonical (key-sorted) echo; stable under key reordering
/// in the source file. 16 hex digits.
std::string config_hash(const RunConfig& run);

}  // namespace plab
