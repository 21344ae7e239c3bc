#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "plab/errors.hpp"
#include "plab/projective.hpp"

namespace plab {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxAberthSweeps = 500;

struct Eval {
  cplx p;
  cplx dp;
  double scale;  // sum_j |c_j| |z|^j, the backward-error yardstick
};

Eval horner(std::span<const cplx> c, cplx z) {
  const double az = std::abs(z);
  cplx p = c.back();
  cplx dp = 0.0;
  double s = std::abs(c.back());
  for (std::size_t j = c.size() - 1; j-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[j];
    s = s * az + std::abs(c[j]);
  }
  return {p, dp, s};
}

std::vector<cplx> aberth(std::span<const cplx> c) {
  const int n = static_cast<int>(c.size()) - 1;
  // Start on a circle whose radius is the geometric mean of the root moduli.
  const double radius = std::pow(std::abs(c.front()) / std::abs(c.back()), 1.0 / n);
  const cplx center = -c[static_cast<std::size_t>(n - 1)] / (double(n) * c.back());
  std::vector<cplx> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / n + 0.7;
    z[static_cast<std::size_t>(k)] = center + radius * cplx(std::cos(angle), std::sin(angle));
  }

  std::vector<bool> done(static_cast<std::size_t>(n), false);
  int remaining = n;
  for (int sweep = 0; sweep < kMaxAberthSweeps && remaining > 0; ++sweep) {
    for (int k = 0; k < n; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      if (done[uk]) continue;
      const Eval e = horner(c, z[uk]);
      if (std::abs(e.p) <= 8.0 * n * kEps * e.scale) {
        done[uk] = true;
        --remaining;
        continue;
      }
      const cplx ratio = e.p / e.dp;
      cplx repulsion = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != k) repulsion += 1.0 / (z[uk] - z[static_cast<std::size_t>(j)]);
      }
      const cplx step = ratio / (1.0 - ratio * repulsion);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[uk] -= step;
      if (std::abs(step) <= 4.0 * kEps * std::abs(z[uk])) {
        done[uk] = true;
        --remaining;
      }
    }
  }
  if (remaining > 0) {
    throw NumericalFailure("Aberth iteration did not converge for degree " + std::to_string(n));
  }
  return z;
}

}  // namespace

std::vector<cplx> polynomial_roots(std::span<const cplx> c) {
  if (c.empty() || c.back() == cplx(0.0)) {
    throw NumericalFailure("polynomial_roots needs a nonzero leading coefficient");
  }
  const std::size_t n = c.size() - 1;
  if (n == 0) return {};
  if (n == 1) return {-c[0] / c[1]};
  if (n == 2) {
    const cplx a = c[2], b = c[1], k = c[0];
    const cplx disc = std::sqrt(b * b - 4.0 * a * k);
    // Pick the sign that avoids cancellation in b + disc.
    const cplx q = -0.5 * ((std::real(std::conj(b) * disc) >= 0.0) ? b + disc : b - disc);
    if (q == cplx(0.0)) return {cplx(0.0), cplx(0.0)};
    return {q / a, k / q};
  }
  return aberth(c);
}

std::vector<Root> form_roots(const BinaryForm& f) {
  const auto c = f.coefficients();
  const int d = f.degree();
  const double cmax = f.max_abs();
  const double vanish = 1e-14 * cmax;

  int at_infinity = 0;
  while (at_infinity <= d && std::abs(c[static_cast<std::size_t>(d - at_infinity)]) <= vanish) {
    ++at_infinity;
  }
  int at_zero = 0;
  while (at_zero <= d && std::abs(c[static_cast<std::size_t>(at_zero)]) <= vanish) {
    ++at_zero;
  }

  std::vector<Root> roots;
  const auto lo = static_cast<std::size_t>(at_zero);
  const auto hi = static_cast<std::size_t>(d - at_infinity);
  if (hi > lo) {
    const std::span<const cplx> reduced = c.subspan(lo, hi - lo + 1);
    const std::vector<cplx> affine = polynomial_roots(reduced);

    const double ratio = cmax / std::max(std::abs(reduced.front()), std::abs(reduced.back()));
    const double tau = 1e-8 * (1.0 + ratio);

    std::vector<ProjectivePoint> pts;
    pts.reserve(affine.size());
    for (cplx z : affine) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw NumericalFailure("root finder produced a non-finite root");
      }
      pts.emplace_back(z, 1.0);
    }
    // Single-linkage clustering in the chordal metric.
    std::vector<int> cluster(pts.size(), -1);
    int clusters = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (cluster[i] >= 0) continue;
      cluster[i] = clusters;
      std::vector<std::size_t> stack{i};
      while (!stack.empty()) {
        const std::size_t a = stack.back();
        stack.pop_back();
        for (std::size_t b = 0; b < pts.size(); ++b) {
          if (cluster[b] < 0 && chordal_dist(pts[a], pts[b]) < tau) {
            cluster[b] = clusters;
            stack.push_back(b);
          }
        }
      }
      ++clusters;
    }
    for (int k = 0; k < clusters; ++k) {
      int count = 0;
      int chart = -1;
      cplx sum = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (cluster[i] != k) continue;
        if (chart < 0) chart = pts[i].chart();
        const cplx v = chart == 0 ? pts[i].z() / pts[i].w() : pts[i].w() / pts[i].z();
        sum += v;
        ++count;
      }
      roots.push_back({ProjectivePoint::from_chart(sum / double(count), chart), count});
    }
  }
  if (at_zero > 0) roots.push_back({ProjectivePoint::zero(), at_zero});
  if (at_infinity > 0) roots.push_back({ProjectivePoint::infinity(), at_infinity});
  return roots;
}

}  // namespace plab
