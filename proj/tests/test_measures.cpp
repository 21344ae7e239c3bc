#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <numeric>

#include "plab/errors.hpp"
#include "plab/measures.hpp"
#include "plab/rng.hpp"

using namespace plab;

namespace {

MapSequence squares(int n) { return MapSequence(std::vector<MapLift>(static_cast<std::size_t>(n), MapLift::power(2))); }

double weight_sum(const Cloud& c) { return std::accumulate(c.weights().begin(), c.weights().end(), 0.0); }

std::vector<ProjectivePoint> roots_of_unity(int k) {
  std::vector<ProjectivePoint> pts;
  for (int j = 0; j < k; ++j) pts.push_back(ProjectivePoint::affine(std::polar(1.0, 2.0 * std::numbers::pi * j / k)));
  return pts;
}

double integral(const TestFunction& f, const Cloud& c) {
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) s += c.weights()[k] * f(c.points()[k]);
  return s;
}

}  // namespace

TEST_CASE("default dictionary layout") {
  const TestDictionary& dict = default_dictionary();
  CHECK(dict.size() == 17);
  CHECK(dict.version == "dict-v1");
  CHECK(dictionary_by_version("dict-v1").size() == 17);
  CHECK_THROWS_AS(dictionary_by_version("dict-v0"), InvalidConfig);
  // First member is the height coordinate scaled by 1/2.
  CHECK(dict.functions[0](ProjectivePoint::infinity()) == doctest::Approx(0.5));
  CHECK(dict.functions[0](ProjectivePoint::zero()) == doctest::Approx(-0.5));
  CHECK(dict.functions[0](ProjectivePoint::affine(1.0)) == doctest::Approx(0.0));
  CHECK(dict.functions[1](ProjectivePoint::affine(1.0)) == doctest::Approx(0.5));
}

TEST_CASE("dictionary members are bounded and 1-Lipschitz on a sphere grid") {
  const TestDictionary& dict = default_dictionary();
  const Cloud grid = sphere_uniform(10000, 1);
  Rng rng(2);
  for (const TestFunction& f : dict.functions) {
    double sup = 0.0, worst_quotient = 0.0;
    for (const ProjectivePoint& p : grid.points()) {
      sup = std::max(sup, std::abs(f(p)));
      // Nearby neighbour at a random small offset.
      const cplx dz = uniform_disc(rng, 1e-3);
      const ProjectivePoint q(p.z() + dz, p.w());
      const double dist = chordal_dist(p, q);
      if (dist > 1e-9) worst_quotient = std::max(worst_quotient, std::abs(f(p) - f(q)) / dist);
    }
    CHECK(sup <= 1.0);
    CHECK(worst_quotient <= 1.05);
  }
}

TEST_CASE("dict_distance examples") {
  const Cloud a = sphere_uniform(100, 3);
  CHECK(dict_distance(a, a) == 0.0);

  const Cloud north = Cloud::point_mass(ProjectivePoint::infinity());
  const Cloud south = Cloud::point_mass(ProjectivePoint::zero());
  double brute = 0.0;
  for (const TestFunction& f : default_dictionary().functions) {
    brute = std::max(brute, std::abs(f(ProjectivePoint::infinity()) - f(ProjectivePoint::zero())));
  }
  CHECK(dict_distance(north, south) == doctest::Approx(brute).epsilon(1e-14));
  CHECK(dict_distance(north, south) <= 2.0);

  const Cloud r10 = Cloud::uniform(roots_of_unity(1024), Provenance::reference);
  const Cloud r11 = Cloud::uniform(roots_of_unity(2048), Provenance::reference);
  CHECK(dict_distance(r10, r11) <= 1e-3);
  CHECK(dict_distance(reference_circle(1.0, 1024), reference_circle(1.0, 4096)) <= 1e-3);
}

TEST_CASE("dict_distance is a pseudometric") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Cloud a = sphere_uniform(20, 3 * s), b = sphere_uniform(30, 3 * s + 1), c = sphere_uniform(40, 3 * s + 2);
    CHECK(dict_distance(a, b) == dict_distance(b, a));
    CHECK(dict_distance(a, c) <= dict_distance(a, b) + dict_distance(b, c) + 1e-15);
    CHECK(dict_distance(a, b) >= 0.0);
  }
}

TEST_CASE("cloud invariants") {
  CHECK_THROWS_AS(Cloud({}, {}, Provenance::reference), InvalidCloud);
  CHECK_THROWS_AS(Cloud({ProjectivePoint::zero()}, {0.5}, Provenance::reference), InvalidCloud);
  CHECK_THROWS_AS(Cloud({ProjectivePoint::zero(), ProjectivePoint::infinity()}, {1.5, -0.5}, Provenance::reference),
                  InvalidCloud);
  CHECK_NOTHROW(Cloud({ProjectivePoint::zero(), ProjectivePoint::infinity()}, {0.25, 0.75}, Provenance::reference));
  CHECK(provenance_from_string(to_string(Provenance::monte_carlo)) == Provenance::monte_carlo);
}

TEST_CASE("merging and local mass") {
  const Cloud c({ProjectivePoint::zero(), ProjectivePoint::affine(1e-12), ProjectivePoint::infinity()}, {0.25, 0.25, 0.5},
                Provenance::reference);
  const Cloud m = c.merged();
  CHECK(m.size() == 2);
  CHECK(weight_sum(m) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<ProjectivePoint> centre{ProjectivePoint::zero()};
  CHECK(c.mass_near(centre, 1e-6) == doctest::Approx(0.5));
  CHECK(c.mass_near(centre, 1e-13) == doctest::Approx(0.25));
}

TEST_CASE("exact fiber measures") {
  const MapSequence seq = squares(12);
  SUBCASE("eighth roots of unity") {
    const Cloud c = exact_fiber_measure(seq, 0, 3, ProjectivePoint(1.0, 1.0));
    REQUIRE(c.size() == 8);
    for (std::size_t k = 0; k < 8; ++k) {
      CHECK(c.weights()[k] == doctest::Approx(0.125));
      const cplx z = c.points()[k].affine_value();
      CHECK(std::abs(std::pow(z, 8) - 1.0) < 1e-12);
    }
    CHECK(c.provenance() == Provenance::exact_fiber);
  }
  SUBCASE("depth zero is the point mass") {
    const Cloud c = exact_fiber_measure(seq, 2, 0, ProjectivePoint(3.0, 1.0));
    REQUIRE(c.size() == 1);
    CHECK(c.weights()[0] == 1.0);
  }
  SUBCASE("the pole is totally invariant") {
    const Cloud c = exact_fiber_measure(seq, 0, 5, ProjectivePoint::infinity());
    REQUIRE(c.size() == 1);
    CHECK(chordal_dist(c.points()[0], ProjectivePoint::infinity()) < 1e-15);
    CHECK(c.weights()[0] == 1.0);
  }
  SUBCASE("cap") {
    CHECK_THROWS_AS(exact_fiber_measure(seq, 0, 12, ProjectivePoint(2.0, 1.0), 1000), CapExceeded);
    CHECK_THROWS_AS(exact_fiber_measure(seq, 0, 13, ProjectivePoint(2.0, 1.0)), StageOutOfRange);
  }
}

TEST_CASE("constant z^d fibers have d^n distinct points") {
  for (int d : {2, 3, 4}) {
    const MapSequence seq(std::vector<MapLift>(12, MapLift::power(d)));
    for (int n = 1; std::pow(d, n) <= 4096; ++n) {
      const Cloud c = exact_fiber_measure(seq, 0, n, ProjectivePoint(cplx(0.7, 0.4), 1.0));
      CHECK(c.size() == static_cast<std::size_t>(std::lround(std::pow(d, n))));
      CHECK(std::abs(weight_sum(c) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("backward sampling") {
  const MapSequence seq = squares(20);
  SUBCASE("near the unit circle") {
    const Cloud c = backward_sample(seq, 0, 20, ProjectivePoint(2.0, 1.0), 10000, 5);
    CHECK(dict_distance(c, reference_circle(1.0, 4096)) < 0.05);
    CHECK(std::abs(weight_sum(c) - 1.0) <= 1e-12);
    CHECK(c.meta().failed_orbits == 0);
  }
  SUBCASE("single orbit") {
    const Cloud c = backward_sample(seq, 0, 20, ProjectivePoint(2.0, 1.0), 1, 5);
    REQUIRE(c.size() == 1);
    CHECK(c.weights()[0] == 1.0);
  }
  SUBCASE("deterministic per seed") {
    const Cloud a = backward_sample(seq, 3, 10, ProjectivePoint(2.0, 1.0), 500, 9);
    const Cloud b = backward_sample(seq, 3, 10, ProjectivePoint(2.0, 1.0), 500, 9);
    const Cloud c = backward_sample(seq, 3, 10, ProjectivePoint(2.0, 1.0), 500, 10);
    REQUIRE(a.size() == b.size());
    bool same = true, differs = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
      same = same && a.points()[k].z() == b.points()[k].z() && a.points()[k].w() == b.points()[k].w();
      differs = differs || chordal_dist(a.points()[k], c.points()[k]) > 0.0;
    }
    CHECK(same);
    CHECK(differs);
  }
  CHECK_THROWS_AS(backward_sample(seq, 0, 21, ProjectivePoint(2.0, 1.0), 5, 1), StageOutOfRange);
}

TEST_CASE("exact and Monte Carlo preimage measures agree") {
  FamilySpec spec;
  spec.radius = 0.1;
  const MapSequence seq = family_sample(spec, 10, 3);
  const ProjectivePoint x(2.0, 1.0);
  const Cloud exact = exact_fiber_measure(seq, 0, 10, x);
  const Cloud mc = backward_sample(seq, 0, 10, x, 20000, 4);
  CHECK(dict_distance(exact, mc) <= 3.0 / std::sqrt(20000.0));
}

TEST_CASE("pushforward") {
  const MapSequence seq = squares(4);
  const Cloud pole = pushforward(seq, 1, Cloud::point_mass(ProjectivePoint::infinity()));
  REQUIRE(pole.size() == 1);
  CHECK(chordal_dist(pole.points()[0], ProjectivePoint::infinity()) < 1e-15);

  const Cloud roots = Cloud::uniform(roots_of_unity(64), Provenance::reference);
  const Cloud pushed = pushforward(seq, 2, roots);
  CHECK(pushed.size() == 32);
  CHECK(pushed.provenance() == Provenance::pushforward);
  CHECK(std::abs(weight_sum(pushed) - 1.0) <= 1e-12);
  CHECK(dict_distance(pushed, Cloud::uniform(roots_of_unity(32), Provenance::reference)) < 1e-12);
}

TEST_CASE("pushforward and composition with P_n are adjoint") {
  FamilySpec spec;
  spec.degrees = {2, 3};
  const MapSequence seq = family_sample(spec, 3, 2);
  const Cloud c = sphere_uniform(500, 8);
  const Cloud pushed = pushforward(seq, 2, c);
  for (const TestFunction& f : default_dictionary().functions) {
    double composed = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) composed += c.weights()[k] * f(apply(seq.lift(2), c.points()[k]).point);
    CHECK(std::abs(integral(f, pushed) - composed) < 1e-9);
  }
}

TEST_CASE("pullback measures") {
  const MapSequence seq = squares(14);
  const ProjectivePoint x(cplx(0.3, 1.2), 1.0);
  const Cloud direct = exact_fiber_measure(seq, 1, 6, x);
  const Cloud mixture = pullback_measure(seq, 1, 6, Cloud::point_mass(x));
  CHECK(dict_distance(direct, mixture) < 1e-14);

  const Cloud pole = pullback_measure(seq, 0, 8, Cloud::point_mass(ProjectivePoint::infinity()));
  CHECK(pole.mass_near(std::vector<ProjectivePoint>{ProjectivePoint::infinity()}, 1e-12) == doctest::Approx(1.0));

  const Cloud disc = disc_uniform(0.5, 0.1, 64, 3);
  PullbackOptions mc;
  mc.mode = PullbackMode::monte_carlo;
  mc.count = 20000;
  mc.seed = 4;
  const Cloud pulled = pullback_measure(seq, 0, 12, disc, mc);
  CHECK(dict_distance(pulled, reference_circle(1.0, 4096)) < 0.05);

  PullbackOptions small;
  small.cap = 100;
  CHECK_THROWS_AS(pullback_measure(seq, 0, 12, disc, small), CapExceeded);
}

TEST_CASE("reference circles and samplers") {
  const Cloud c = reference_circle(1.0, 4);
  REQUIRE(c.size() == 4);
  const cplx expected[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(std::abs(c.points()[k].affine_value() - expected[k]) < 1e-15);
    CHECK(c.weights()[k] == 0.25);
  }
  const Cloud sphere = sphere_uniform(20000, 1);
  // Uniform on the sphere: mean height near 0, mean squared height near 1/3.
  double h = 0.0, h2 = 0.0;
  for (const ProjectivePoint& p : sphere.points()) {
    h += p.embed()[2] / 20000.0;
    h2 += p.embed()[2] * p.embed()[2] / 20000.0;
  }
  CHECK(std::abs(h) < 0.03);
  CHECK(std::abs(h2 - 1.0 / 3.0) < 0.02);
  const Cloud disc = disc_uniform(cplx(0.5, 0.5), 0.1, 200, 2);
  for (const ProjectivePoint& p : disc.points()) {
    CHECK(std::abs(p.affine_value() - cplx(0.5, 0.5)) <= 0.1 + 1e-12);
  }
}

TEST_CASE("cloud CSV round trip") {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "plab_cloud_test";
  std::filesystem::create_directories(dir);
  const Cloud c({ProjectivePoint::affine(cplx(0.1, -0.3)), ProjectivePoint::affine(5.0), ProjectivePoint::infinity()},
                {0.2, 0.3, 0.5}, Provenance::monte_carlo);
  write_cloud_csv(c, dir / "c.csv");
  write_cloud_manifest(c, dir / "c.json");
  const Cloud back = read_cloud_csv(dir / "c.csv", Provenance::monte_carlo);
  REQUIRE(back.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(chordal_dist(back.points()[k], c.points()[k]) < 1e-15);
    CHECK(back.weights()[k] == c.weights()[k]);
  }
  CHECK(std::filesystem::exists(dir / "c.json"));
  CHECK_THROWS_AS(read_cloud_csv(dir / "missing.csv", Provenance::reference), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("assignment solver matches brute force") {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 6);
    std::vector<double> cost(n * n);
    for (double& x : cost) x = uniform01(rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += cost[i * n + perm[i]];
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(assignment_cost(cost, n) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("thinned Wasserstein dominates the dictionary distance") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Cloud a = sphere_uniform(256, 2 * s), b = disc_uniform(cplx(0.5, 0.0), 0.4, 256, 2 * s + 1);
    CHECK(thinned_wasserstein(a, b) >= dict_distance(a, b) - 1e-12);
    CHECK(thinned_wasserstein(a, a) < 1e-12);
  }
}
