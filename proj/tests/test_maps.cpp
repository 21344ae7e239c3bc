#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "plab/errors.hpp"
#include "plab/maps.hpp"
#include "plab/rng.hpp"

using namespace plab;

namespace {

MapSequence squares(int n) { return MapSequence(std::vector<MapLift>(static_cast<std::size_t>(n), MapLift::power(2))); }

ProjectivePoint random_point(Rng& rng) { return {uniform_disc(rng, 1.0), uniform_disc(rng, 1.0)}; }

// Brute-force extrema of |lift| over a fine (alpha, beta) grid; phase of the
// first coordinate is irrelevant to the norm.
std::pair<double, double> brute_force_bounds(const MapLift& lift, int na, int nb) {
  double lo = INFINITY, hi = 0.0;
  for (int a = 0; a <= na; ++a) {
    const double alpha = 0.5 * std::numbers::pi * a / na;
    for (int b = 0; b < nb; ++b) {
      const cplx z = std::cos(alpha);
      const cplx w = std::polar(std::sin(alpha), 2.0 * std::numbers::pi * b / nb);
      const double v = std::hypot(std::abs(lift.p1()(z, w)), std::abs(lift.p2()(z, w)));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("map lifts validate degree and nondegeneracy") {
  CHECK_THROWS_AS(MapLift(BinaryForm({0.0, 1.0}), BinaryForm({1.0, 0.0})), DegenerateLift);
  CHECK_THROWS_AS(MapLift(BinaryForm({0.0, 0.0, 1.0}), BinaryForm({1.0, 0.0, 0.0, 0.0})), DegenerateLift);
  // Z^2 and Z W share the root Z = 0.
  CHECK_THROWS_AS(MapLift(BinaryForm({0.0, 0.0, 1.0}), BinaryForm({0.0, 1.0, 0.0})), DegenerateLift);
  CHECK(MapLift::power(3).relative_resultant() == doctest::Approx(1.0));
}

TEST_CASE("apply examples") {
  const MapLift sq = MapLift::power(2);
  const StepResult pole = apply(sq, ProjectivePoint::infinity());
  CHECK(chordal_dist(pole.point, ProjectivePoint::infinity()) < 1e-15);
  CHECK(std::abs(pole.log_norm_increment) < 1e-15);

  const StepResult diag = apply(sq, ProjectivePoint(1.0, 1.0));
  CHECK(chordal_dist(diag.point, ProjectivePoint(1.0, 1.0)) < 1e-15);
  CHECK(diag.log_norm_increment == doctest::Approx(std::log(1.0 / std::sqrt(2.0))).epsilon(1e-14));
}

TEST_CASE("sphere bounds of pure powers") {
  for (int d = 2; d <= 6; ++d) {
    const SphereBounds b = sphere_bounds(MapLift::power(d));
    CHECK(b.lower == doctest::Approx(std::pow(2.0, (1.0 - d) / 2.0)).epsilon(1e-4));
    CHECK(b.upper == doctest::Approx(1.0).epsilon(1e-4));
  }
  CHECK(sphere_bounds(MapLift::power(2)).t_bound() == doctest::Approx(std::sqrt(2.0) * 1.01).epsilon(1e-4));
}

TEST_CASE("sphere bounds agree with a brute-force grid for perturbations") {
  for (double c : {0.01, 0.05, 0.1}) {
    const MapLift lift(BinaryForm({0.0, 0.0, 1.0}), BinaryForm({1.0, 0.0, c}));
    const SphereBounds b = sphere_bounds(lift);
    const auto [lo, hi] = brute_force_bounds(lift, 400, 400);
    CHECK(b.lower <= lo * (1.0 + 1e-6));
    CHECK(b.upper >= hi * (1.0 - 1e-6));
    CHECK(b.lower == doctest::Approx(lo).epsilon(1e-3));
    CHECK(b.upper == doctest::Approx(hi).epsilon(1e-3));
    CHECK(std::abs(b.lower - 1.0 / std::sqrt(2.0)) < 2.0 * c);
    CHECK(std::abs(b.upper - 1.0) < 2.0 * c);
  }
}

TEST_CASE("apply increments stay inside log t") {
  Rng rng(11);
  FamilySpec spec;
  spec.degrees = {2, 3};
  spec.radius = 0.2;
  const MapSequence seq = family_sample(spec, 10, 5);
  const double log_t = std::log(seq.t_bound());
  for (int k = 0; k < 1000; ++k) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 10));
    const double inc = apply(seq.lift(n), random_point(rng)).log_norm_increment;
    CHECK(std::abs(inc) < log_t);
  }
}

TEST_CASE("orbit examples and composition") {
  const MapSequence seq = squares(3);
  const OrbitResult empty = orbit(seq, 0, 0, ProjectivePoint(2.0, 1.0));
  CHECK(chordal_dist(empty.point, ProjectivePoint(2.0, 1.0)) == 0.0);
  CHECK(empty.accumulated_log == 0.0);

  const OrbitResult o = orbit(seq, 0, 3, ProjectivePoint(2.0, 1.0));
  CHECK(chordal_dist(o.point, ProjectivePoint(256.0, 1.0)) < 1e-14);
  // |(2,1)/sqrt5|^8 lift: log |(256, 1)| - 8 log sqrt5.
  CHECK(o.accumulated_log == doctest::Approx(std::log(std::hypot(256.0, 1.0)) - 4.0 * std::log(5.0)));

  CHECK_THROWS_AS(orbit(seq, 2, 2, ProjectivePoint::zero()), StageOutOfRange);
  CHECK_THROWS_AS(orbit(seq, -1, 1, ProjectivePoint::zero()), StageOutOfRange);
}

TEST_CASE("orbit over n+m steps equals n steps then m steps") {
  Rng rng(12);
  FamilySpec spec;
  spec.degrees = {2, 3};
  const MapSequence seq = family_sample(spec, 12, 3);
  for (int k = 0; k < 200; ++k) {
    const ProjectivePoint z = random_point(rng);
    const int n = static_cast<int>(uniform_index(rng, 6)), m = static_cast<int>(uniform_index(rng, 6));
    const OrbitResult whole = orbit(seq, 0, n + m, z);
    const OrbitResult first = orbit(seq, 0, n, z);
    const OrbitResult second = orbit(seq, n, m, first.point);
    const double d_m = seq.degree_product(n, n + m).as_double();
    CHECK(chordal_dist(whole.point, second.point) < 1e-9);
    CHECK(std::abs(whole.accumulated_log - (d_m * first.accumulated_log + second.accumulated_log)) <
          1e-9 * std::max(1.0, std::abs(whole.accumulated_log)));
  }
}

TEST_CASE("degree products") {
  std::vector<MapLift> lifts;
  for (int k = 0; k < 70; ++k) lifts.push_back(MapLift::power(k % 2 == 0 ? 2 : 3));
  const MapSequence seq(lifts);
  CHECK(*seq.degree_product(0, 2).exact == 6);
  CHECK(*seq.degree_product(1, 1).exact == 1);
  CHECK(*seq.degree_product(0, 4).exact == 36);
  const DegreeProduct big = seq.degree_product(0, 70);
  CHECK(!big.exact);
  CHECK(big.log_value == doctest::Approx(35.0 * std::log(6.0)));
  CHECK_THROWS_AS(seq.degree_product(3, 2), StageOutOfRange);
  CHECK_THROWS_AS(seq.degree_product(0, 71), StageOutOfRange);
}

TEST_CASE("family sampling") {
  SUBCASE("explicit list of z^2 gives t = sqrt2 * 1.01") {
    FamilySpec spec;
    spec.kind = FamilyKind::explicit_list;
    spec.maps = {MapLift::power(2)};
    const MapSequence seq = family_sample(spec, 8, 0);
    CHECK(seq.length() == 8);
    CHECK(seq.t_bound() == doctest::Approx(std::sqrt(2.0) * 1.01).epsilon(1e-4));
  }
  SUBCASE("monic polynomials are reproducible") {
    FamilySpec spec;
    spec.kind = FamilyKind::monic_polynomial;
    spec.radius = 0.5;
    const MapSequence a = family_sample(spec, 6, 7), b = family_sample(spec, 6, 7), c = family_sample(spec, 6, 8);
    bool differs = false;
    for (int n = 1; n <= 6; ++n) {
      CHECK(std::ranges::equal(a.lift(n).p1().coefficients(), b.lift(n).p1().coefficients()));
      CHECK(a.lift(n).p1()[2] == cplx(1.0));
      CHECK(a.lift(n).p2()[0] == cplx(1.0));
      for (int j = 0; j < 2; ++j) CHECK(std::abs(a.lift(n).p1()[j]) <= 0.5);
      differs = differs || !std::ranges::equal(a.lift(n).p1().coefficients(), c.lift(n).p1().coefficients());
    }
    CHECK(differs);
  }
  SUBCASE("perturbed powers stay within the radius") {
    FamilySpec spec;
    spec.degrees = {2, 3};
    spec.radius = 0.1;
    const MapSequence seq = family_sample(spec, 40, 1);
    bool saw2 = false, saw3 = false;
    for (int n = 1; n <= 40; ++n) {
      const MapLift& lift = seq.lift(n);
      const int d = lift.degree();
      saw2 = saw2 || d == 2;
      saw3 = saw3 || d == 3;
      const MapLift pure = MapLift::power(d);
      for (int j = 0; j <= d; ++j) {
        CHECK(std::abs(lift.p1()[j] - pure.p1()[j]) <= 0.1);
        CHECK(std::abs(lift.p2()[j] - pure.p2()[j]) <= 0.1);
      }
      CHECK(seq.t_bound() >= sphere_bounds(lift).t_bound() * (1.0 - 1e-12));
    }
    CHECK(saw2);
    CHECK(saw3);
  }
  SUBCASE("invalid specs") {
    FamilySpec spec;
    spec.degrees = {1};
    CHECK_THROWS_AS(family_sample(spec, 3, 0), InvalidSpec);
    spec.degrees = {2};
    spec.radius = -1.0;
    CHECK_THROWS_AS(family_sample(spec, 3, 0), InvalidSpec);
    FamilySpec list;
    list.kind = FamilyKind::explicit_list;
    CHECK_THROWS_AS(family_sample(list, 3, 0), InvalidSpec);
  }
  CHECK(family_kind_from_string(to_string(FamilyKind::monic_polynomial)) == FamilyKind::monic_polynomial);
}

TEST_CASE("fiber examples") {
  const MapLift sq = MapLift::power(2);
  const auto ones = fiber(sq, ProjectivePoint(1.0, 1.0));
  REQUIRE(ones.size() == 2);
  const double d0 = chordal_dist(ones[0].point, ProjectivePoint(1.0, 1.0));
  const double d1 = chordal_dist(ones[1].point, ProjectivePoint(1.0, 1.0));
  CHECK(std::min(d0, d1) < 1e-14);
  CHECK(std::max(d0, d1) == doctest::Approx(1.0));

  const auto origin = fiber(sq, ProjectivePoint::zero());
  REQUIRE(origin.size() == 1);
  CHECK(origin[0].multiplicity == 2);
  CHECK(chordal_dist(origin[0].point, ProjectivePoint::zero()) < 1e-15);

  const auto pole = fiber(sq, ProjectivePoint::infinity());
  REQUIRE(pole.size() == 1);
  CHECK(pole[0].multiplicity == 2);
  CHECK(chordal_dist(pole[0].point, ProjectivePoint::infinity()) < 1e-15);
}

TEST_CASE("fiber round trip and mass conservation") {
  Rng rng(13);
  FamilySpec spec;
  spec.degrees = {2, 3, 4, 5};
  spec.radius = 0.3;
  const MapSequence seq = family_sample(spec, 20, 9);
  for (int k = 0; k < 1000; ++k) {
    const MapLift& lift = seq.lift(1 + static_cast<int>(uniform_index(rng, 20)));
    const ProjectivePoint y = random_point(rng);
    int total = 0;
    for (const Root& r : fiber(lift, y)) {
      total += r.multiplicity;
      if (r.multiplicity == 1) CHECK(chordal_dist(apply(lift, r.point).point, y) < 1e-6);
    }
    CHECK(total == lift.degree());
  }
}

TEST_CASE("critical data") {
  const BinaryForm w = wronskian(MapLift::power(2));
  CHECK(w.degree() == 2);
  CHECK(std::abs(w[1] - cplx(4.0)) < 1e-15);
  CHECK(std::abs(w[0]) + std::abs(w[2]) == 0.0);

  const MapSequence seq = squares(4);
  for (int m : {3, 2}) {
    const auto values = critical_data(seq, m, 4);
    bool zero = false, inf = false;
    for (const Root& r : values) {
      zero = zero || chordal_dist(r.point, ProjectivePoint::zero()) < 1e-12;
      inf = inf || chordal_dist(r.point, ProjectivePoint::infinity()) < 1e-12;
      CHECK((chordal_dist(r.point, ProjectivePoint::zero()) < 1e-12 ||
             chordal_dist(r.point, ProjectivePoint::infinity()) < 1e-12));
    }
    CHECK(zero);
    CHECK(inf);
  }

  FamilySpec spec;
  spec.radius = 0.2;
  const MapSequence perturbed = family_sample(spec, 6, 4);
  for (int l = 1; l <= 5; ++l) {
    int count = 0;
    for (const Root& r : critical_data(perturbed, 6 - l, 6)) count += r.multiplicity;
    CHECK(count <= 2 * l);
    CHECK(count >= 1);
  }
  CHECK_THROWS_AS(critical_data(perturbed, 4, 4), StageOutOfRange);
}

TEST_CASE("critical points of a perturbed quadratic are Wronskian roots") {
  FamilySpec spec;
  spec.radius = 0.2;
  const MapSequence seq = family_sample(spec, 3, 21);
  for (int n = 1; n <= 3; ++n) {
    const MapLift& lift = seq.lift(n);
    for (const Root& c : form_roots(wronskian(lift))) {
      // A critical point has a double preimage: its image's fiber collapses there.
      const ProjectivePoint image = apply(lift, c.point).point;
      int mult_near = 0;
      for (const Root& r : fiber(lift, image)) {
        if (chordal_dist(r.point, c.point) < 1e-5) mult_near += r.multiplicity;
      }
      CHECK(mult_near == 2);
    }
  }
}

TEST_CASE("window shares t") {
  const MapSequence seq = squares(6);
  const MapSequence w = seq.window(2, 5);
  CHECK(w.length() == 3);
  CHECK(w.t_bound() == seq.t_bound());
}
