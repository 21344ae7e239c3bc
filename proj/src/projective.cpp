#include "plab/projective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plab/errors.hpp"

namespace plab {

ProjectivePoint::ProjectivePoint(cplx z, cplx w) {
  // Already-unit pairs are kept bit for bit so normalization is idempotent.
  if (std::abs(std::norm(z) + std::norm(w) - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
    z_ = z;
    w_ = w;
    return;
  }
  // Scale first so huge or tiny inputs do not overflow the norm.
  const double scale = std::max(std::abs(z), std::abs(w));
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ZeroVector("projective point needs a finite nonzero coordinate pair");
  }
  z /= scale;
  w /= scale;
  const double norm = std::sqrt(std::norm(z) + std::norm(w));
  z_ = z / norm;
  w_ = w / norm;
}

ProjectivePoint ProjectivePoint::from_chart(cplx value, int chart) {
  return chart == 0 ? ProjectivePoint(value, 1.0) : ProjectivePoint(1.0, value);
}

cplx ProjectivePoint::affine_value() const {
  if (w_ == cplx(0.0)) {
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  return z_ / w_;
}

Vec3 ProjectivePoint::embed() const {
  const cplx xy = 2.0 * z_ * std::conj(w_);
  return {xy.real(), xy.imag(), std::norm(z_) - std::norm(w_)};
}

ProjectivePoint normalize(cplx z, cplx w) { return {z, w}; }

double chordal_dist(const ProjectivePoint& a, const ProjectivePoint& b) {
  return std::min(1.0, std::abs(a.z() * b.w() - b.z() * a.w()));
}

BinaryForm::BinaryForm(std::vector<cplx> coefficients) : c_(std::move(coefficients)) {
  if (c_.empty()) {
    throw InvalidSpec("binary form needs at least one coefficient");
  }
  if (std::all_of(c_.begin(), c_.end(), [](cplx c) { return c == cplx(0.0); })) {
    throw ZeroVector("binary form is identically zero");
  }
}

BinaryForm::BinaryForm(std::vector<cplx> coefficients, Unchecked) : c_(std::move(coefficients)) {}

BinaryForm BinaryForm::monomial(int z_power, int w_power, cplx c) {
  std::vector<cplx> coeffs(static_cast<std::size_t>(z_power + w_power + 1), 0.0);
  coeffs[static_cast<std::size_t>(z_power)] = c;
  return BinaryForm(std::move(coeffs));
}

double BinaryForm::max_abs() const {
  double m = 0.0;
  for (cplx c : c_) m = std::max(m, std::abs(c));
  return m;
}

cplx BinaryForm::operator()(cplx z, cplx w) const {
  // Homogeneous Horner: r <- r*z + c_j * w^(d-j).
  const int d = degree();
  cplx r = c_[static_cast<std::size_t>(d)];
  cplx wp = 1.0;
  for (int j = d - 1; j >= 0; --j) {
    wp *= w;
    r = r * z + c_[static_cast<std::size_t>(j)] * wp;
  }
  return r;
}

BinaryForm BinaryForm::d_dz() const {
  const int d = degree();
  if (d == 0) return BinaryForm({cplx(0.0)}, Unchecked{});
  std::vector<cplx> out(static_cast<std::size_t>(d));
  for (int j = 1; j <= d; ++j) out[static_cast<std::size_t>(j - 1)] = double(j) * (*this)[j];
  return BinaryForm(std::move(out), Unchecked{});
}

BinaryForm BinaryForm::d_dw() const {
  const int d = degree();
  if (d == 0) return BinaryForm({cplx(0.0)}, Unchecked{});
  std::vector<cplx> out(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(j)] = double(d - j) * (*this)[j];
  return BinaryForm(std::move(out), Unchecked{});
}

BinaryForm operator*(const BinaryForm& a, const BinaryForm& b) {
  std::vector<cplx> out(static_cast<std::size_t>(a.degree() + b.degree() + 1), 0.0);
  for (int i = 0; i <= a.degree(); ++i) {
    for (int j = 0; j <= b.degree(); ++j) {
      out[static_cast<std::size_t>(i + j)] += a[i] * b[j];
    }
  }
  return BinaryForm(std::move(out), BinaryForm::Unchecked{});
}

BinaryForm operator*(cplx s, const BinaryForm& f) {
  std::vector<cplx> out(f.c_);
  for (cplx& c : out) c *= s;
  return BinaryForm(std::move(out), BinaryForm::Unchecked{});
}

BinaryForm operator+(const BinaryForm& a, const BinaryForm& b) {
  if (a.degree() != b.degree()) throw InvalidSpec("adding binary forms of different degree");
  std::vector<cplx> out(a.c_);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += b.c_[j];
  return BinaryForm(std::move(out), BinaryForm::Unchecked{});
}

BinaryForm operator-(const BinaryForm& a, const BinaryForm& b) { return a + cplx(-1.0) * b; }

}  // namespace plab
