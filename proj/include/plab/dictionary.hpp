#pragma once

#include <string>
#include <vector>

#include "plab/projective.hpp"

namespace plab {

class Cloud;

/// One real test function on the sphere, already rescaled so that its sup
/// norm and its Lipschitz constant in the chordal metric are both <= 1.
struct TestFunction {
  enum class Kind { coordinate, quadratic, bump };

  std::string name;
  Kind kind;
  int i = 0;                   // coordinate index, or first factor
  int j = 0;                   // second factor for quadratics
  Vec3 center{0.0, 0.0, 0.0};  // bumps only
  double width = 0.0;          // bumps only
  double scale = 1.0;

  double operator()(const Vec3& x) const;
  double operator()(const ProjectivePoint& p) const { return (*this)(p.embed()); }
};

/// Finite stand-in for the unit ball of C^1 test functions. A dictionary
/// distance is a lower bound for the full supremum distance.
struct TestDictionary {
  std::string version;
  std::vector<TestFunction> functions;

  std::size_t size() const { return functions.size(); }
  /// All function values at one point, in dictionary order.
  void evaluate(const ProjectivePoint& p, std::span<double> out) const;
  /// Weighted integrals of every function against the cloud.
  std::vector<double> integrals(const Cloud& c) const;
};

inline constexpr const char* kDictionaryVersion = "dict-v1";

/// x3/2, x1/2, x2/2 (the embedding coordinates), the six quadratic monomials,
/// and eight Gaussian bumps centred on the cube vertices: 17 functions.
const TestDictionary& default_dictionary();

/// Looks up a dictionary by version string; throws InvalidConfig otherwise.
const TestDictionary& dictionary_by_version(const std::string& version);

/// Max over the dictionary of |int phi da - int phi db|.
double dict_distance(const Cloud& a, const Cloud& b, const TestDictionary& dict = default_dictionary());

}  // namespace plab
