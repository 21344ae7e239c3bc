#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plab/projective.hpp"

namespace plab {

/// A degree-d endomorphism of the projective line given by its homogeneous
/// lift (p1, p2). Construction rejects common roots via the resultant.
class MapLift {
 public:
  MapLift(BinaryForm p1, BinaryForm p2);

  /// (Z^d, W^d).
  static MapLift power(int degree);

  const BinaryForm& p1() const { return p1_; }
  const BinaryForm& p2() const { return p2_; }
  int degree() const { return p1_.degree(); }

  /// |Res(p1, p2)| / (max|p1|^d max|p2|^d).
  double relative_resultant() const;

 private:
  BinaryForm p1_;
  BinaryForm p2_;
};

struct StepResult {
  ProjectivePoint point;
  /// log of the Euclidean norm of the lift evaluated at the unit representative.
  double log_norm_increment;
};

StepResult apply(const MapLift& lift, const ProjectivePoint& z);

struct SphereBounds {
  double lower;
  double upper;
  /// max(upper, 1/lower) with a 1.01 safety factor.
  double t_bound() const;
};

/// Min and max of |lift(z)| over the unit sphere of C^2, by a grid of 101x128
/// points refined locally around the best candidates. Throws DegenerateLift
/// when the minimum falls below 1e-10.
SphereBounds sphere_bounds(const MapLift& lift);

/// Degree product d(m,n); exact while it fits in 64 bits.
struct DegreeProduct {
  std::optional<std::uint64_t> exact;
  double log_value;

  double as_double() const;
};

/// P_1, ..., P_N with P_n mapping stage n-1 to stage n.
class MapSequence {
 public:
  /// Estimates the shared sphere bound t from the lifts.
  explicit MapSequence(std::vector<MapLift> lifts);
  /// Uses a supplied t (must already dominate every lift); for callers that
  /// derive sub-sequences of a certified sequence.
  MapSequence(std::vector<MapLift> lifts, double t_bound);

  int length() const { return static_cast<int>(lifts_.size()); }
  /// P_n for 1 <= n <= length().
  const MapLift& lift(int n) const;
  int degree(int n) const { return lift(n).degree(); }
  double t_bound() const { return t_bound_; }
  double coeff_bound() const { return coeff_bound_; }

  /// d(m,n) = d_{m+1} ... d_n; throws StageOutOfRange unless 0 <= m <= n <= N.
  DegreeProduct degree_product(int m, int n) const;

  /// P_{m+1}, ..., P_n as a stand-alone sequence sharing t.
  MapSequence window(int m, int n) const;

  const std::vector<MapLift>& lifts() const { return lifts_; }

 private:
  void check_stage(int m, int n) const;

  std::vector<MapLift> lifts_;
  double t_bound_ = 1.0;
  double coeff_bound_ = 0.0;
};

struct OrbitResult {
  ProjectivePoint point;
  /// log |P~(i, i+n)(z)| for the unit representative z.
  double accumulated_log;
};

/// P(i, i+n)(z) with renormalization after each step.
OrbitResult orbit(const MapSequence& seq, int i, int n, const ProjectivePoint& z);

/// Preimages of y under one lift: roots of W_y p1 - Z_y p2.
std::vector<Root> fiber(const MapLift& lift, const ProjectivePoint& y);

/// The Wronskian form whose roots are the critical points of the lift.
BinaryForm wronskian(const MapLift& lift);

/// Critical values of P(m, n): the union over j in (m, n] of P(j, n) applied
/// to the critical values of P_j, with multiplicity.
std::vector<Root> critical_data(const MapSequence& seq, int m, int n);

enum class FamilyKind { monic_polynomial, perturbed_power, explicit_list };

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& s);

struct FamilySpec {
  FamilyKind kind = FamilyKind::perturbed_power;
  std::vector<int> degrees{2};
  double radius = 0.1;
  /// Only for explicit_list; repeated cyclically to the requested length.
  std::vector<MapLift> maps;
};

/// Deterministic in (spec, length, seed).
MapSequence family_sample(const FamilySpec& spec, int length, std::uint64_t seed);

}  // namespace plab
