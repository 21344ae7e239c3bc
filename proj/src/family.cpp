#include <algorithm>
#include <cmath>

#include "plab/errors.hpp"
#include "plab/maps.hpp"
#include "plab/rng.hpp"

namespace plab {
namespace {

constexpr int kMaxDegree = 16;
constexpr int kMaxRedraws = 100;

MapLift draw_lift(const FamilySpec& spec, Rng& rng) {
  const int d = spec.degrees[uniform_index(rng, spec.degrees.size())];
  const auto n = static_cast<std::size_t>(d + 1);
  std::vector<cplx> p1(n, 0.0);
  std::vector<cplx> p2(n, 0.0);
  p1[static_cast<std::size_t>(d)] = 1.0;
  p2[0] = 1.0;
  if (spec.kind == FamilyKind::monic_polynomial) {
    // z^d + a_{d-1} z^{d-1} + ... + a_0, homogenized against W^d.
    for (int j = 0; j < d; ++j) p1[static_cast<std::size_t>(j)] = uniform_disc(rng, spec.radius);
  } else {
    for (auto& c : p1) c += uniform_disc(rng, spec.radius);
    for (auto& c : p2) c += uniform_disc(rng, spec.radius);
  }
  return {BinaryForm(std::move(p1)), BinaryForm(std::move(p2))};
}

}  // namespace

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::monic_polynomial: return "monic-polynomial";
    case FamilyKind::perturbed_power: return "perturbed-power";
    case FamilyKind::explicit_list: return "explicit-list";
  }
  return "?";
}

FamilyKind family_kind_from_string(const std::string& s) {
  if (s == "monic-polynomial") return FamilyKind::monic_polynomial;
  if (s == "perturbed-power") return FamilyKind::perturbed_power;
  if (s == "explicit-list") return FamilyKind::explicit_list;
  throw InvalidSpec("unknown family kind '" + s + "'");
}

MapSequence family_sample(const FamilySpec& spec, int length, std::uint64_t seed) {
  if (length < 1) throw InvalidSpec("sequence length must be positive");
  if (spec.kind == FamilyKind::explicit_list) {
    if (spec.maps.empty()) throw InvalidSpec("explicit-list family needs at least one map");
    std::vector<MapLift> lifts;
    lifts.reserve(static_cast<std::size_t>(length));
    for (int k = 0; k < length; ++k) lifts.push_back(spec.maps[static_cast<std::size_t>(k) % spec.maps.size()]);
    return MapSequence(std::move(lifts));
  }
  if (spec.degrees.empty()) throw InvalidSpec("family degree set is empty");
  for (int d : spec.degrees) {
    if (d < 2 || d > kMaxDegree) {
      throw InvalidSpec("family degree " + std::to_string(d) + " outside 2.." +
                        std::to_string(kMaxDegree));
    }
  }
  if (!(spec.radius >= 0.0) || !std::isfinite(spec.radius)) {
    throw InvalidSpec("family radius must be finite and nonnegative");
  }

  Rng rng(seed);
  std::vector<MapLift> lifts;
  lifts.reserve(static_cast<std::size_t>(length));
  double t = 1.0;
  for (int k = 0; k < length; ++k) {
    for (int attempt = 0;; ++attempt) {
      try {
        MapLift lift = draw_lift(spec, rng);
        t = std::max(t, sphere_bounds(lift).t_bound());
        lifts.push_back(std::move(lift));
        break;
      } catch (const DegenerateLift&) {
        if (attempt + 1 >= kMaxRedraws) {
          throw InvalidSpec("family radius " + std::to_string(spec.radius) +
                            " keeps producing degenerate maps");
        }
      }
    }
  }
  return MapSequence(std::move(lifts), t);
}

}  // namespace plab
