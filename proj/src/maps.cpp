#include "plab/maps.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "plab/errors.hpp"

namespace plab {
namespace {

constexpr double kResultantFloor = 1e-10;

double lift_norm(const MapLift& lift, double alpha, double beta) {
  const cplx z(std::cos(alpha), 0.0);
  const cplx w = std::sin(alpha) * cplx(std::cos(beta), std::sin(beta));
  return std::hypot(std::abs(lift.p1()(z, w)), std::abs(lift.p2()(z, w)));
}

struct GridPoint {
  double alpha;
  double beta;
  double value;
};

// Pattern search from a grid point; sign = +1 maximizes, -1 minimizes.
double refine(const MapLift& lift, GridPoint start, double h_alpha, double h_beta, double sign) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  GridPoint best = start;
  double last = best.value;
  while (h_alpha > 1e-9) {
    bool moved = false;
    for (int da = -1; da <= 1; ++da) {
      for (int db = -1; db <= 1; ++db) {
        if (da == 0 && db == 0) continue;
        const double a = std::clamp(best.alpha + da * h_alpha, 0.0, kHalfPi);
        const double b = best.beta + db * h_beta;
        const double v = lift_norm(lift, a, b);
        if (sign * v > sign * best.value) {
          best = {a, b, v};
          moved = true;
        }
      }
    }
    if (!moved) {
      if (std::abs(best.value - last) <= 1e-4 * std::abs(best.value) && h_alpha < 1e-6) break;
      last = best.value;
      h_alpha *= 0.5;
      h_beta *= 0.5;
    }
  }
  return best.value;
}

}  // namespace

MapLift::MapLift(BinaryForm p1, BinaryForm p2) : p1_(std::move(p1)), p2_(std::move(p2)) {
  if (p1_.degree() != p2_.degree()) {
    throw DegenerateLift("lift components must share a degree");
  }
  if (p1_.degree() < 2) {
    throw DegenerateLift("lift degree must be at least 2");
  }
  const double rel = relative_resultant();
  if (!(rel > kResultantFloor)) {
    throw DegenerateLift("lift components have a common root (relative resultant " +
                         std::to_string(rel) + ")");
  }
}

MapLift MapLift::power(int degree) {
  return {BinaryForm::monomial(degree, 0), BinaryForm::monomial(0, degree)};
}

double MapLift::relative_resultant() const {
  const int d = p1_.degree();
  const int n = 2 * d;
  Eigen::MatrixXcd sylvester = Eigen::MatrixXcd::Zero(n, n);
  for (int r = 0; r < d; ++r) {
    for (int j = 0; j <= d; ++j) {
      sylvester(r, r + j) = p1_[j];
      sylvester(d + r, r + j) = p2_[j];
    }
  }
  const double det = std::abs(sylvester.partialPivLu().determinant());
  return det / (std::pow(p1_.max_abs(), d) * std::pow(p2_.max_abs(), d));
}

StepResult apply(const MapLift& lift, const ProjectivePoint& z) {
  const cplx a = lift.p1()(z);
  const cplx b = lift.p2()(z);
  const double norm = std::hypot(std::abs(a), std::abs(b));
  return {ProjectivePoint(a, b), std::log(norm)};
}

double SphereBounds::t_bound() const { return std::max(upper, 1.0 / lower) * 1.01; }

SphereBounds sphere_bounds(const MapLift& lift) {
  constexpr int kAlphaSteps = 101;
  constexpr int kBetaSteps = 128;
  constexpr int kCandidates = 6;
  const double h_alpha = (std::numbers::pi / 2.0) / (kAlphaSteps - 1);
  const double h_beta = 2.0 * std::numbers::pi / kBetaSteps;

  std::vector<GridPoint> grid;
  grid.reserve(kAlphaSteps * kBetaSteps);
  for (int i = 0; i < kAlphaSteps; ++i) {
    for (int j = 0; j < kBetaSteps; ++j) {
      const double a = i * h_alpha;
      const double b = j * h_beta;
      grid.push_back({a, b, lift_norm(lift, a, b)});
    }
  }
  auto by_value = [](const GridPoint& x, const GridPoint& y) { return x.value < y.value; };
  std::partial_sort(grid.begin(), grid.begin() + kCandidates, grid.end(), by_value);
  double lower = grid.front().value;
  for (int k = 0; k < kCandidates; ++k) {
    lower = std::min(lower, refine(lift, grid[static_cast<std::size_t>(k)], h_alpha, h_beta, -1.0));
  }
  std::partial_sort(grid.begin(), grid.begin() + kCandidates, grid.end(),
                    [&](const GridPoint& x, const GridPoint& y) { return by_value(y, x); });
  double upper = grid.front().value;
  for (int k = 0; k < kCandidates; ++k) {
    upper = std::max(upper, refine(lift, grid[static_cast<std::size_t>(k)], h_alpha, h_beta, 1.0));
  }
  if (lower < 1e-10) {
    throw DegenerateLift("lift nearly vanishes on the unit sphere");
  }
  return {lower, upper};
}

double DegreeProduct::as_double() const {
  return exact ? static_cast<double>(*exact) : std::exp(log_value);
}

MapSequence::MapSequence(std::vector<MapLift> lifts) : lifts_(std::move(lifts)) {
  if (lifts_.empty()) throw InvalidSpec("map sequence must not be empty");
  // Identical lifts share one estimate.
  std::vector<std::pair<const MapLift*, double>> seen;
  for (const MapLift& l : lifts_) {
    double t = 0.0;
    bool found = false;
    for (const auto& [other, t_other] : seen) {
      if (std::ranges::equal(other->p1().coefficients(), l.p1().coefficients()) &&
          std::ranges::equal(other->p2().coefficients(), l.p2().coefficients())) {
        t = t_other;
        found = true;
        break;
      }
    }
    if (!found) {
      t = sphere_bounds(l).t_bound();
      seen.emplace_back(&l, t);
    }
    t_bound_ = std::max(t_bound_, t);
    coeff_bound_ = std::max({coeff_bound_, l.p1().max_abs(), l.p2().max_abs()});
  }
}

MapSequence::MapSequence(std::vector<MapLift> lifts, double t_bound)
    : lifts_(std::move(lifts)), t_bound_(t_bound) {
  if (lifts_.empty()) throw InvalidSpec("map sequence must not be empty");
  if (!(t_bound_ > 1.0)) throw InvalidSpec("sphere bound t must exceed 1");
  for (const MapLift& l : lifts_) {
    coeff_bound_ = std::max({coeff_bound_, l.p1().max_abs(), l.p2().max_abs()});
  }
}

const MapLift& MapSequence::lift(int n) const {
  if (n < 1 || n > length()) {
    throw StageOutOfRange("map index " + std::to_string(n) + " outside 1.." +
                          std::to_string(length()));
  }
  return lifts_[static_cast<std::size_t>(n - 1)];
}

void MapSequence::check_stage(int m, int n) const {
  if (m < 0 || n < m || n > length()) {
    throw StageOutOfRange("stage range (" + std::to_string(m) + ", " + std::to_string(n) +
                          ") outside 0.." + std::to_string(length()));
  }
}

DegreeProduct MapSequence::degree_product(int m, int n) const {
  check_stage(m, n);
  DegreeProduct out{std::uint64_t{1}, 0.0};
  for (int j = m + 1; j <= n; ++j) {
    const auto d = static_cast<std::uint64_t>(degree(j));
    out.log_value += std::log(double(d));
    if (out.exact && *out.exact > UINT64_MAX / d) out.exact.reset();
    if (out.exact) *out.exact *= d;
  }
  return out;
}

MapSequence MapSequence::window(int m, int n) const {
  check_stage(m, n);
  if (m == n) throw StageOutOfRange("empty window");
  return MapSequence(std::vector<MapLift>(lifts_.begin() + m, lifts_.begin() + n), t_bound_);
}

OrbitResult orbit(const MapSequence& seq, int i, int n, const ProjectivePoint& z) {
  if (i < 0 || n < 0 || i + n > seq.length()) {
    throw StageOutOfRange("orbit (" + std::to_string(i) + ", +" + std::to_string(n) +
                          ") exceeds sequence length " + std::to_string(seq.length()));
  }
  OrbitResult out{z, 0.0};
  for (int k = i + 1; k <= i + n; ++k) {
    const StepResult s = apply(seq.lift(k), out.point);
    out.accumulated_log = out.accumulated_log * seq.degree(k) + s.log_norm_increment;
    out.point = s.point;
  }
  return out;
}

std::vector<Root> fiber(const MapLift& lift, const ProjectivePoint& y) {
  const int d = lift.degree();
  std::vector<cplx> c(static_cast<std::size_t>(d + 1));
  for (int j = 0; j <= d; ++j) {
    c[static_cast<std::size_t>(j)] = y.w() * lift.p1()[j] - y.z() * lift.p2()[j];
  }
  return form_roots(BinaryForm(std::move(c)));
}

BinaryForm wronskian(const MapLift& lift) {
  const BinaryForm w = lift.p1().d_dz() * lift.p2().d_dw() - lift.p1().d_dw() * lift.p2().d_dz();
  const auto c = w.coefficients();
  return BinaryForm(std::vector<cplx>(c.begin(), c.end()));
}

std::vector<Root> critical_data(const MapSequence& seq, int m, int n) {
  if (m < 0 || m >= n || n > seq.length()) {
    throw StageOutOfRange("critical window (" + std::to_string(m) + ", " + std::to_string(n) +
                          ") invalid for length " + std::to_string(seq.length()));
  }
  std::vector<Root> out;
  for (int j = m + 1; j <= n; ++j) {
    for (const Root& c : form_roots(wronskian(seq.lift(j)))) {
      const ProjectivePoint value = apply(seq.lift(j), c.point).point;
      const ProjectivePoint image = orbit(seq, j, n - j, value).point;
      auto same = std::ranges::find_if(
          out, [&](const Root& r) { return chordal_dist(r.point, image) < 1e-10; });
      if (same != out.end()) {
        same->multiplicity += c.multiplicity;
      } else {
        out.push_back({image, c.multiplicity});
      }
    }
  }
  return out;
}

}  // namespace plab
