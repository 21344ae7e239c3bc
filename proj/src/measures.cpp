#include "plab/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "plab/errors.hpp"
#include "plab/parallel.hpp"
#include "plab/rng.hpp"

namespace plab {
namespace {

constexpr int kMaxOrbitAttempts = 16;

double neumaier_sum(std::span<const double> xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

// One backward orbit from `start` at stage m+n down to stage m.
ProjectivePoint backward_orbit(const MapSequence& seq, int m, int n, ProjectivePoint start, Rng& rng) {
  for (int s = m + n; s > m; --s) {
    const MapLift& lift = seq.lift(s);
    const std::vector<Root> roots = fiber(lift, start);
    const double u = uniform01(rng) * lift.degree();
    double acc = 0.0;
    const Root* chosen = &roots.back();
    for (const Root& r : roots) {
      acc += r.multiplicity;
      if (u < acc) {
        chosen = &r;
        break;
      }
    }
    start = chosen->point;
  }
  return start;
}

void check_window(const MapSequence& seq, int m, int n) {
  if (m < 0 || n < 0 || m + n > seq.length()) {
    throw StageOutOfRange("pullback window (" + std::to_string(m) + ", +" + std::to_string(n) +
                          ") exceeds sequence length " + std::to_string(seq.length()));
  }
}

// Runs `count` orbits, orbit k seeded from derive_seed(seed, k); `start_for`
// picks the starting point from the orbit's generator.
template <typename StartFor>
std::vector<ProjectivePoint> run_orbits(const MapSequence& seq, int m, int n, std::size_t count,
                                        std::uint64_t seed, StartFor&& start_for, int& failures) {
  std::vector<ProjectivePoint> out(count, ProjectivePoint::infinity());
  std::vector<int> failed(count, 0);
  parallel_for(count, [&](std::size_t k) {
    const std::uint64_t orbit_seed = derive_seed(seed, k);
    for (int attempt = 0; attempt < kMaxOrbitAttempts; ++attempt) {
      Rng rng(derive_seed(orbit_seed, static_cast<std::uint64_t>(attempt)));
      try {
        const ProjectivePoint start = start_for(rng);
        out[k] = backward_orbit(seq, m, n, start, rng);
        return;
      } catch (const NumericalFailure&) {
        ++failed[k];
      }
    }
    throw NumericalFailure("backward orbit " + std::to_string(k) + " failed repeatedly");
  });
  failures = 0;
  for (int f : failed) failures += f;
  if (static_cast<double>(failures) > 0.01 * static_cast<double>(count)) {
    throw NumericalFailure(std::to_string(failures) + " of " + std::to_string(count) +
                           " backward orbits failed");
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw IoError("cannot parse number '" + std::string(s) + "' in " + context);
  }
  return v;
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::exact_fiber: return "exact-fiber";
    case Provenance::monte_carlo: return "monte-carlo";
    case Provenance::pushforward: return "pushforward";
    case Provenance::reference: return "reference";
    case Provenance::counterexample: return "counterexample";
  }
  return "?";
}

Provenance provenance_from_string(const std::string& s) {
  for (Provenance p : {Provenance::exact_fiber, Provenance::monte_carlo, Provenance::pushforward,
                       Provenance::reference, Provenance::counterexample}) {
    if (to_string(p) == s) return p;
  }
  throw InvalidCloud("unknown provenance '" + s + "'");
}

Cloud::Cloud(std::vector<ProjectivePoint> points, std::vector<double> weights, Provenance provenance,
             CloudMeta meta)
    : points_(std::move(points)), weights_(std::move(weights)), provenance_(provenance), meta_(meta) {
  if (points_.empty() || points_.size() != weights_.size()) {
    throw InvalidCloud("cloud needs equally many points and weights, at least one");
  }
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidCloud("cloud weights must be positive");
  }
  const double total = neumaier_sum(weights_);
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidCloud("cloud weights sum to " + format_double(total));
  }
}

Cloud Cloud::uniform(std::vector<ProjectivePoint> points, Provenance provenance, CloudMeta meta) {
  std::vector<double> w(points.size(), points.empty() ? 0.0 : 1.0 / double(points.size()));
  return Cloud(std::move(points), std::move(w), provenance, meta);
}

Cloud Cloud::point_mass(const ProjectivePoint& p, Provenance provenance) {
  return Cloud({p}, {1.0}, provenance);
}

Cloud Cloud::merged(double tolerance) const {
  struct Key {
    std::int64_t a, b, c;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = static_cast<std::uint64_t>(k.a) * 0x9e3779b97f4a7c15ULL;
      h ^= static_cast<std::uint64_t>(k.b) + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
      h ^= static_cast<std::uint64_t>(k.c) + 0x94d049bb133111ebULL + (h << 6) + (h >> 2);
      return static_cast<std::size_t>(h);
    }
  };
  // Chordal tolerance t means Euclidean distance 2t in the embedding.
  const double cell = std::max(2.0 * tolerance, 1e-15);
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> grid;
  std::vector<ProjectivePoint> pts;
  std::vector<double> ws;
  for (std::size_t p = 0; p < points_.size(); ++p) {
    const Vec3 x = points_[p].embed();
    const Key key{static_cast<std::int64_t>(std::floor(x[0] / cell)),
                  static_cast<std::int64_t>(std::floor(x[1] / cell)),
                  static_cast<std::int64_t>(std::floor(x[2] / cell))};
    std::optional<std::size_t> hit;
    for (std::int64_t da = -1; da <= 1 && !hit; ++da) {
      for (std::int64_t db = -1; db <= 1 && !hit; ++db) {
        for (std::int64_t dc = -1; dc <= 1 && !hit; ++dc) {
          const auto it = grid.find({key.a + da, key.b + db, key.c + dc});
          if (it == grid.end()) continue;
          for (std::size_t rep : it->second) {
            if (chordal_dist(pts[rep], points_[p]) < tolerance) {
              hit = rep;
              break;
            }
          }
        }
      }
    }
    if (hit) {
      ws[*hit] += weights_[p];
    } else {
      grid[key].push_back(pts.size());
      pts.push_back(points_[p]);
      ws.push_back(weights_[p]);
    }
  }
  return Cloud(std::move(pts), std::move(ws), provenance_, meta_);
}

double Cloud::mass_near(std::span<const ProjectivePoint> centres, double radius) const {
  double mass = 0.0;
  for (std::size_t p = 0; p < points_.size(); ++p) {
    for (const ProjectivePoint& c : centres) {
      if (chordal_dist(points_[p], c) < radius) {
        mass += weights_[p];
        break;
      }
    }
  }
  return mass;
}

Cloud exact_fiber_measure(const MapSequence& seq, int m, int n, const ProjectivePoint& x,
                          std::uint64_t cap) {
  check_window(seq, m, n);
  const DegreeProduct dp = seq.degree_product(m, m + n);
  if (!dp.exact || *dp.exact > cap) {
    throw CapExceeded("fiber of P(" + std::to_string(m) + ", " + std::to_string(m + n) +
                      ") has degree above the enumeration cap " + std::to_string(cap) +
                      "; use the Monte Carlo sampler");
  }
  std::vector<ProjectivePoint> pts{x};
  std::vector<double> ws{1.0};
  for (int s = m + n; s > m; --s) {
    const MapLift& lift = seq.lift(s);
    const double d = lift.degree();
    std::vector<ProjectivePoint> next_pts;
    std::vector<double> next_ws;
    next_pts.reserve(pts.size() * static_cast<std::size_t>(d));
    next_ws.reserve(pts.size() * static_cast<std::size_t>(d));
    for (std::size_t p = 0; p < pts.size(); ++p) {
      for (const Root& r : fiber(lift, pts[p])) {
        next_pts.push_back(r.point);
        next_ws.push_back(ws[p] * r.multiplicity / d);
      }
    }
    pts = std::move(next_pts);
    ws = std::move(next_ws);
  }
  return Cloud(std::move(pts), std::move(ws), Provenance::exact_fiber, {std::nullopt, m, n, 0});
}

Cloud backward_sample(const MapSequence& seq, int m, int n, const ProjectivePoint& x,
                      std::size_t count, std::uint64_t seed) {
  check_window(seq, m, n);
  if (count == 0) throw InvalidSpec("backward_sample needs at least one orbit");
  int failures = 0;
  std::vector<ProjectivePoint> pts =
      run_orbits(seq, m, n, count, seed, [&](Rng&) { return x; }, failures);
  return Cloud::uniform(std::move(pts), Provenance::monte_carlo, {seed, m, n, failures});
}

Cloud pushforward(const MapSequence& seq, int n, const Cloud& c) {
  const MapLift& lift = seq.lift(n);
  std::vector<ProjectivePoint> pts;
  pts.reserve(c.size());
  for (const ProjectivePoint& p : c.points()) pts.push_back(apply(lift, p).point);
  CloudMeta meta = c.meta();
  meta.stage = n;
  return Cloud(std::move(pts), c.weights(), Provenance::pushforward, meta).merged(1e-10);
}

Cloud pullback_measure(const MapSequence& seq, int m, int n, const Cloud& source,
                       const PullbackOptions& options) {
  check_window(seq, m, n);
  if (options.mode == PullbackMode::exact) {
    const DegreeProduct dp = seq.degree_product(m, m + n);
    if (!dp.exact || *dp.exact > options.cap) {
      throw CapExceeded("pullback of degree above the enumeration cap " + std::to_string(options.cap));
    }
    std::vector<ProjectivePoint> pts;
    std::vector<double> ws;
    for (std::size_t s = 0; s < source.size(); ++s) {
      const Cloud leaf = exact_fiber_measure(seq, m, n, source.points()[s], options.cap);
      for (std::size_t p = 0; p < leaf.size(); ++p) {
        pts.push_back(leaf.points()[p]);
        ws.push_back(source.weights()[s] * leaf.weights()[p]);
      }
    }
    return Cloud(std::move(pts), std::move(ws), Provenance::exact_fiber, {std::nullopt, m, n, 0});
  }
  if (options.count == 0) throw InvalidSpec("Monte Carlo pullback needs at least one orbit");
  std::vector<double> cumulative(source.size());
  double acc = 0.0;
  for (std::size_t s = 0; s < source.size(); ++s) cumulative[s] = (acc += source.weights()[s]);
  auto start_for = [&](Rng& rng) {
    const double u = uniform01(rng) * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                                  source.size() - 1);
    return source.points()[idx];
  };
  int failures = 0;
  std::vector<ProjectivePoint> pts =
      run_orbits(seq, m, n, options.count, options.seed, start_for, failures);
  return Cloud::uniform(std::move(pts), Provenance::monte_carlo, {options.seed, m, n, failures});
}

Cloud reference_circle(double radius, std::size_t count, Provenance provenance) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidSpec("circle radius must be positive");
  if (count == 0) throw InvalidSpec("circle needs at least one point");
  std::vector<ProjectivePoint> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double a = 2.0 * std::numbers::pi * double(k) / double(count);
    pts.push_back(ProjectivePoint::affine(std::polar(radius, a)));
  }
  return Cloud::uniform(std::move(pts), provenance);
}

Cloud sphere_uniform(std::size_t count, std::uint64_t seed) {
  if (count == 0) throw InvalidSpec("sphere sample needs at least one point");
  Rng rng(seed);
  std::vector<ProjectivePoint> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    // Archimedes: the height is uniform on [-1, 1].
    const double h = 2.0 * uniform01(rng) - 1.0;
    const double a = 2.0 * std::numbers::pi * uniform01(rng);
    pts.emplace_back(std::polar(std::sqrt((1.0 + h) / 2.0), a), cplx(std::sqrt((1.0 - h) / 2.0)));
  }
  return Cloud::uniform(std::move(pts), Provenance::reference, {seed, 0, 0, 0});
}

Cloud disc_uniform(cplx center, double radius, std::size_t count, std::uint64_t seed) {
  if (!(radius > 0.0)) throw InvalidSpec("disc radius must be positive");
  if (count == 0) throw InvalidSpec("disc sample needs at least one point");
  Rng rng(seed);
  std::vector<ProjectivePoint> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < count; ++k) pts.push_back(ProjectivePoint::affine(center + uniform_disc(rng, radius)));
  return Cloud::uniform(std::move(pts), Provenance::reference, {seed, 0, 0, 0});
}

void write_cloud_csv(const Cloud& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "re,im,chart_flag,weight\n";
  for (std::size_t p = 0; p < c.size(); ++p) {
    const cplx v = c.points()[p].chart_coordinate();
    out << format_double(v.real()) << ',' << format_double(v.imag()) << ','
        << c.points()[p].chart() << ',' << format_double(c.weights()[p]) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Cloud read_cloud_csv(const std::filesystem::path& path, Provenance provenance) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "re,im,chart_flag,weight") {
    throw IoError(path.string() + ": missing cloud CSV header");
  }
  std::vector<ProjectivePoint> pts;
  std::vector<double> ws;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
      fields.push_back(rest.substr(0, pos));
    }
    fields.push_back(rest);
    const std::string ctx = path.string() + ":" + std::to_string(lineno);
    if (fields.size() != 4) throw IoError(ctx + ": expected 4 fields");
    const double re = parse_double(fields[0], ctx);
    const double im = parse_double(fields[1], ctx);
    const int chart = static_cast<int>(parse_double(fields[2], ctx));
    if (chart != 0 && chart != 1) throw IoError(ctx + ": chart_flag must be 0 or 1");
    pts.push_back(ProjectivePoint::from_chart({re, im}, chart));
    ws.push_back(parse_double(fields[3], ctx));
  }
  return Cloud(std::move(pts), std::move(ws), provenance);
}

void write_cloud_manifest(const Cloud& c, const std::filesystem::path& path) {
  nlohmann::json j;
  j["provenance"] = to_string(c.provenance());
  j["seed"] = c.meta().seed ? nlohmann::json(*c.meta().seed) : nlohmann::json(nullptr);
  j["stage"] = c.meta().stage;
  j["depth"] = c.meta().depth;
  j["failed_orbits"] = c.meta().failed_orbits;
  j["size"] = c.size();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace plab
