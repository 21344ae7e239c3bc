#include "plab/dictionary.hpp"

#include <algorithm>
#include <cmath>

#include "plab/errors.hpp"
#include "plab/measures.hpp"

namespace plab {
namespace {

constexpr double kBumpWidth = 0.5;

// The chordal distance is half the Euclidean chord in the embedding, so an
// ambient gradient bound g gives a chordal Lipschitz constant 2g.
TestDictionary build_default() {
  TestDictionary dict{kDictionaryVersion, {}};
  const char* axis[3] = {"x1", "x2", "x3"};
  for (int i : {2, 0, 1}) {
    dict.functions.push_back({std::string(axis[i]) + "/2", TestFunction::Kind::coordinate, i, i,
                              {}, 0.0, 0.5});
  }
  for (int i = 0; i < 3; ++i) {
    // |grad x_i^2| = 2|x_i| <= 2 on the ball.
    dict.functions.push_back({std::string(axis[i]) + "^2/4", TestFunction::Kind::quadratic, i, i,
                              {}, 0.0, 0.25});
  }
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    // |grad x_i x_j| = sqrt(x_i^2 + x_j^2) <= 1 on the ball.
    dict.functions.push_back({std::string(axis[i]) + "*" + axis[j] + "/2",
                              TestFunction::Kind::quadratic, i, j, {}, 0.0, 0.5});
  }
  // exp(-r^2 / 2s^2) has gradient at most e^{-1/2} / s.
  const double lipschitz = 2.0 * std::exp(-0.5) / kBumpWidth;
  const double bump_scale = 1.0 / std::max(1.0, lipschitz);
  const double c = 1.0 / std::sqrt(3.0);
  int k = 0;
  for (double sx : {-c, c}) {
    for (double sy : {-c, c}) {
      for (double sz : {-c, c}) {
        dict.functions.push_back({"bump" + std::to_string(k++), TestFunction::Kind::bump, 0, 0,
                                  {sx, sy, sz}, kBumpWidth, bump_scale});
      }
    }
  }
  return dict;
}

}  // namespace

double TestFunction::operator()(const Vec3& x) const {
  switch (kind) {
    case Kind::coordinate:
      return scale * x[static_cast<std::size_t>(i)];
    case Kind::quadratic:
      return scale * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
    case Kind::bump: {
      const double dx = x[0] - center[0], dy = x[1] - center[1], dz = x[2] - center[2];
      return scale * std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * width * width));
    }
  }
  return 0.0;
}

void TestDictionary::evaluate(const ProjectivePoint& p, std::span<double> out) const {
  const Vec3 x = p.embed();
  for (std::size_t k = 0; k < functions.size(); ++k) out[k] = functions[k](x);
}

std::vector<double> TestDictionary::integrals(const Cloud& c) const {
  std::vector<double> sums(functions.size(), 0.0);
  std::vector<double> values(functions.size());
  for (std::size_t p = 0; p < c.size(); ++p) {
    evaluate(c.points()[p], values);
    const double w = c.weights()[p];
    for (std::size_t k = 0; k < sums.size(); ++k) sums[k] += w * values[k];
  }
  return sums;
}

const TestDictionary& default_dictionary() {
  static const TestDictionary dict = build_default();
  return dict;
}

const TestDictionary& dictionary_by_version(const std::string& version) {
  if (version == kDictionaryVersion) return default_dictionary();
  throw InvalidConfig("unknown dictionary version '" + version + "'");
}

double dict_distance(const Cloud& a, const Cloud& b, const TestDictionary& dict) {
  const std::vector<double> ia = dict.integrals(a);
  const std::vector<double> ib = dict.integrals(b);
  double best = 0.0;
  for (std::size_t k = 0; k < ia.size(); ++k) best = std::max(best, std::abs(ia[k] - ib[k]));
  return best;
}

}  // namespace plab
