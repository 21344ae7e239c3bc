#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "plab/dictionary.hpp"
#include "plab/maps.hpp"

namespace plab {

enum class Provenance { exact_fiber, monte_carlo, pushforward, reference, counterexample };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct CloudMeta {
  std::optional<std::uint64_t> seed;
  int stage = 0;
  int depth = 0;
  int failed_orbits = 0;
};

/// A probability measure as a weighted finite point set. Weights are
/// positive and sum to 1 within 1e-12.
class Cloud {
 public:
  Cloud(std::vector<ProjectivePoint> points, std::vector<double> weights, Provenance provenance,
        CloudMeta meta = {});

  static Cloud uniform(std::vector<ProjectivePoint> points, Provenance provenance, CloudMeta meta = {});
  static Cloud point_mass(const ProjectivePoint& p, Provenance provenance = Provenance::reference);

  std::size_t size() const { return points_.size(); }
  const std::vector<ProjectivePoint>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  Provenance provenance() const { return provenance_; }
  const CloudMeta& meta() const { return meta_; }

  /// Merges points closer than `tolerance` (chordal), summing their weights.
  Cloud merged(double tolerance = 1e-10) const;

  /// Mass within chordal distance `radius` of any of the centres.
  double mass_near(std::span<const ProjectivePoint> centres, double radius) const;

 private:
  std::vector<ProjectivePoint> points_;
  std::vector<double> weights_;
  Provenance provenance_;
  CloudMeta meta_;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 1ULL << 14;

/// The normalized pullback of the point mass at x (stage m+n) to stage m:
/// every preimage under P(m, m+n) with weight multiplicity / d(m, m+n).
/// Throws CapExceeded when d(m, m+n) > cap.
Cloud exact_fiber_measure(const MapSequence& seq, int m, int n, const ProjectivePoint& x,
                          std::uint64_t cap = kDefaultEnumerationCap);

/// `count` independent backward orbits from x at stage m+n down to stage m,
/// each step choosing a preimage with probability multiplicity / d. Orbits
/// whose root finding fails are redrawn; more than 1% failures aborts.
Cloud backward_sample(const MapSequence& seq, int m, int n, const ProjectivePoint& x,
                      std::size_t count, std::uint64_t seed);

/// Image of the cloud under P_n with duplicate points merged.
Cloud pushforward(const MapSequence& seq, int n, const Cloud& c);

enum class PullbackMode { exact, monte_carlo };

struct PullbackOptions {
  PullbackMode mode = PullbackMode::exact;
  std::uint64_t cap = kDefaultEnumerationCap;
  std::size_t count = 100000;  // Monte Carlo only
  std::uint64_t seed = 0;      // Monte Carlo only
};

/// P(m, m+n)^* nu / d(m, m+n) for a source cloud nu at stage m+n.
Cloud pullback_measure(const MapSequence& seq, int m, int n, const Cloud& source,
                       const PullbackOptions& options = {});

/// N equally spaced points on |z| = radius.
Cloud reference_circle(double radius, std::size_t count, Provenance provenance = Provenance::reference);

/// Uniform on the sphere (area measure of the embedding).
Cloud sphere_uniform(std::size_t count, std::uint64_t seed);

/// Area-uniform on the affine disc |z - center| <= radius.
Cloud disc_uniform(cplx center, double radius, std::size_t count, std::uint64_t seed);

/// CSV with header re,im,chart_flag,weight; coordinates are the chart values.
void write_cloud_csv(const Cloud& c, const std::filesystem::path& path);
Cloud read_cloud_csv(const std::filesystem::path& path, Provenance provenance);
/// JSON manifest describing the cloud (seed, stages, provenance, size).
void write_cloud_manifest(const Cloud& c, const std::filesystem::path& path);

/// 1-Wasserstein distance in the chordal metric between the clouds after
/// each is thinned to at most `max_points` equal-weight points by systematic
/// resampling. Upper-bounds the dictionary distance up to thinning error.
double thinned_wasserstein(const Cloud& a, const Cloud& b, std::size_t max_points = 512);

/// Minimum-cost perfect matching on a square cost matrix (row-major).
double assignment_cost(std::span<const double> cost, std::size_t n);

}  // namespace plab
