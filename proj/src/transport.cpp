#include <cmath>
#include <limits>

#include "plab/errors.hpp"
#include "plab/measures.hpp"

namespace plab {
namespace {

// Systematic resampling to k equal-weight points.
std::vector<ProjectivePoint> thin(const Cloud& c, std::size_t k) {
  std::vector<ProjectivePoint> out;
  out.reserve(k);
  double cumulative = c.weights()[0];
  std::size_t idx = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const double u = (double(j) + 0.5) / double(k);
    while (u > cumulative && idx + 1 < c.size()) cumulative += c.weights()[++idx];
    out.push_back(c.points()[idx]);
  }
  return out;
}

}  // namespace

// Hungarian algorithm with row/column potentials, O(n^3).
double assignment_cost(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) throw InvalidSpec("assignment cost matrix must be n x n");
  if (n == 0) return 0.0;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t r = match[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost[(r - 1) * n + (c - 1)] - u[r] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  double total = 0.0;
  for (std::size_t c = 1; c <= n; ++c) total += cost[(match[c] - 1) * n + (c - 1)];
  return total;
}

double thinned_wasserstein(const Cloud& a, const Cloud& b, std::size_t max_points) {
  if (max_points == 0) throw InvalidSpec("thinning needs at least one point");
  const std::size_t k = std::min(max_points, std::max(a.size(), b.size()));
  const std::vector<ProjectivePoint> pa = thin(a, k);
  const std::vector<ProjectivePoint> pb = thin(b, k);
  std::vector<double> cost(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) cost[i * k + j] = chordal_dist(pa[i], pb[j]);
  }
  return assignment_cost(cost, k) / double(k);
}

}  // namespace plab
