#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace plab {

using cplx = std::complex<double>;

/// Unit-sphere coordinates in real 3-space; the pole [1:0] maps to (0,0,1).
using Vec3 = std::array<double, 3>;

/// A point [Z:W] of the projective line, stored with |Z|^2 + |W|^2 = 1.
class ProjectivePoint {
 public:
  /// Normalizes (z, w); throws ZeroVector on (0, 0).
  ProjectivePoint(cplx z, cplx w);

  static ProjectivePoint infinity() { return {cplx(1.0), cplx(0.0)}; }
  static ProjectivePoint zero() { return {cplx(0.0), cplx(1.0)}; }
  /// The point [z:1].
  static ProjectivePoint affine(cplx z) { return {z, cplx(1.0)}; }

  cplx z() const { return z_; }
  cplx w() const { return w_; }

  /// Chart 0 holds Z/W (used when |Z| <= |W|), chart 1 holds W/Z. The stored
  /// coordinate always has modulus <= 1.
  int chart() const { return std::abs(z_) <= std::abs(w_) ? 0 : 1; }
  cplx chart_coordinate() const { return chart() == 0 ? z_ / w_ : w_ / z_; }
  static ProjectivePoint from_chart(cplx value, int chart);

  /// Z/W; infinite for the pole.
  cplx affine_value() const;

  Vec3 embed() const;

 private:
  cplx z_;
  cplx w_;
};

ProjectivePoint normalize(cplx z, cplx w);

/// |Z_a W_b - Z_b W_a| on unit representatives; half the Euclidean chord
/// between the embedded points.
double chordal_dist(const ProjectivePoint& a, const ProjectivePoint& b);

/// Sum_j c_j Z^j W^(d-j).
class BinaryForm {
 public:
  explicit BinaryForm(std::vector<cplx> coefficients);

  static BinaryForm monomial(int z_power, int w_power, cplx c = 1.0);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  std::span<const cplx> coefficients() const { return c_; }
  cplx operator[](int j) const { return c_[static_cast<std::size_t>(j)]; }
  double max_abs() const;

  cplx operator()(cplx z, cplx w) const;
  cplx operator()(const ProjectivePoint& p) const { return (*this)(p.z(), p.w()); }

  BinaryForm d_dz() const;
  BinaryForm d_dw() const;

  friend BinaryForm operator*(const BinaryForm& a, const BinaryForm& b);
  friend BinaryForm operator*(cplx s, const BinaryForm& f);
  /// Both operands must share a degree.
  friend BinaryForm operator+(const BinaryForm& a, const BinaryForm& b);
  friend BinaryForm operator-(const BinaryForm& a, const BinaryForm& b);

 private:
  // Unlike the public constructor this admits the zero form, which derivative
  // and arithmetic results can legitimately produce.
  struct Unchecked {};
  BinaryForm(std::vector<cplx> coefficients, Unchecked);

  std::vector<cplx> c_;
};

struct Root {
  ProjectivePoint point;
  int multiplicity;
};

/// All roots of f on the projective line with multiplicities summing to
/// deg f. Roots at [1:0] and [0:1] are read off vanishing extreme
/// coefficients; the rest come from the affine polynomial. Throws
/// NumericalFailure if the affine iteration does not converge.
std::vector<Root> form_roots(const BinaryForm& f);

/// Roots of sum_j c_j z^j with c.back() != 0 (no multiplicity grouping).
std::vector<cplx> polynomial_roots(std::span<const cplx> c);

}  // namespace plab
