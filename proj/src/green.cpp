#include "plab/green.hpp"

#include <cmath>

namespace plab {
namespace {

void check_depth(const MapSequence& seq, int i, int n) {
  if (i < 0 || n < 0 || i + n > seq.length()) {
    throw StageOutOfRange("Green depth " + std::to_string(n) + " at stage " + std::to_string(i) +
                          " exceeds sequence length " + std::to_string(seq.length()));
  }
}

double log_raw_norm(cplx z, cplx w) {
  const double n = std::hypot(std::abs(z), std::abs(w));
  if (!(n > 0.0)) throw ZeroVector("Green function evaluated at the origin");
  return std::log(n);
}

}  // namespace

double green_tail_bound(const MapSequence& seq, int i, int n) {
  if (i < 0 || n < 0 || i + n + 1 > seq.length()) {
    throw StageOutOfRange("tail bound at stage " + std::to_string(i) + ", depth " +
                          std::to_string(n) + " needs d_" + std::to_string(i + n + 1));
  }
  const double d = seq.degree_product(i, i + n).as_double();
  return std::log(seq.t_bound()) / (d * (seq.degree(i + n + 1) - 1));
}

double green_tail_bound_or_fallback(const MapSequence& seq, int i, int n) {
  if (i + n + 1 <= seq.length()) return green_tail_bound(seq, i, n);
  check_depth(seq, i, n);
  return std::log(seq.t_bound()) / seq.degree_product(i, i + n).as_double();
}

std::vector<double> green_series(const MapSequence& seq, int i, cplx z, cplx w, int max_depth) {
  check_depth(seq, i, max_depth);
  const double base = log_raw_norm(z, w);
  ProjectivePoint p(z, w);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(max_depth + 1));
  out.push_back(base);
  // G_{n,i}(u) = sum_k l_k / d(i, i+k) for the unit representative u.
  double sum = 0.0;
  double inv_d = 1.0;
  for (int k = 1; k <= max_depth; ++k) {
    const StepResult s = apply(seq.lift(i + k), p);
    inv_d /= seq.degree(i + k);
    sum += s.log_norm_increment * inv_d;
    p = s.point;
    out.push_back(base + sum);
  }
  return out;
}

GreenValue green_at_depth(const MapSequence& seq, int i, int n, cplx z, cplx w) {
  const std::vector<double> series = green_series(seq, i, z, w, n);
  return {series.back(), n, green_tail_bound_or_fallback(seq, i, n), i};
}

GreenValue green_eval(const MapSequence& seq, int i, cplx z, cplx w, double target_tail) {
  check_depth(seq, i, 0);
  const int deepest = seq.length() - i;
  int depth = deepest;
  for (int n = 0; n <= deepest; ++n) {
    if (green_tail_bound_or_fallback(seq, i, n) <= target_tail) {
      depth = n;
      break;
    }
  }
  GreenValue g = green_at_depth(seq, i, depth, z, w);
  if (g.tail_bound > target_tail) {
    throw SequenceTooShort("sequence of length " + std::to_string(seq.length()) +
                               " cannot reach tail bound " + std::to_string(target_tail) +
                               "; deepest bound is " + std::to_string(g.tail_bound),
                           g);
  }
  return g;
}

GreenValue green_eval(const MapSequence& seq, int i, const ProjectivePoint& p, double target_tail) {
  return green_eval(seq, i, p.z(), p.w(), target_tail);
}

PullbackCheck check_pullback(const MapSequence& seq, int n, const ProjectivePoint& z, int depth) {
  if (n < 1 || depth < 1 || n - 1 + depth > seq.length()) {
    throw StageOutOfRange("pullback check at stage " + std::to_string(n) + ", depth " +
                          std::to_string(depth) + " exceeds sequence length " +
                          std::to_string(seq.length()));
  }
  const StepResult step = apply(seq.lift(n), z);
  // G_n at the raw image e^l u equals l + G_n(u).
  const GreenValue image = green_at_depth(seq, n, depth - 1, step.point.z(), step.point.w());
  const double lhs = (step.log_norm_increment + image.value) / seq.degree(n);
  const GreenValue source = green_at_depth(seq, n - 1, depth, z.z(), z.w());
  return {std::abs(lhs - source.value), image.tail_bound + source.tail_bound};
}

}  // namespace plab
