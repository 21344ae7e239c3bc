#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "plab/experiments.hpp"
#include "plab/rng.hpp"

namespace plab::detail {

// Seed streams; each purpose draws from its own derived generator.
enum Stream : std::uint64_t {
  kBasePoints = 1,
  kSource = 2,
  kReference = 100,
  kEtaX = 1000,
  kEtaY = 2000,
  kEtaLimit = 3000,
  kInvariancePrev = 4000,
  kInvarianceNext = 5000,
  kMixingZero = 6000,
  kMixingStage = 7000,
  kCriticalMass = 8000,
  kCorollary = 9000,
};

inline double noise_floor(std::size_t samples) { return 3.0 / std::sqrt(double(samples)); }

struct Estimate {
  Cloud cloud;
  double noise;
  bool exact;
};

// eta_{x,n,m}: exact when d(m, m+n) fits the cap, Monte Carlo otherwise.
Estimate preimage_measure(const MapSequence& seq, int m, int n, const ProjectivePoint& x,
                          const ExperimentConfig& cfg, std::uint64_t stream);

// Estimate of the equilibrium measure at stage m.
Estimate equilibrium_estimate(const MapSequence& seq, int m, const ProjectivePoint& x,
                              const ExperimentConfig& cfg, std::uint64_t stream);

// True when every step of the series rises by at most `slack`.
bool non_increasing(const std::vector<double>& values, double slack);

void require(bool condition, const std::string& message);

}  // namespace plab::detail
