#pragma once

#include <vector>

#include "plab/errors.hpp"
#include "plab/maps.hpp"

namespace plab {

/// G_{n,i} at one point with a bound on its distance to the limit G_i.
struct GreenValue {
  double value;
  int depth;
  double tail_bound;
  int stage;
};

/// Raised when no available depth reaches the requested tail bound; carries
/// the deepest value the sequence supports.
class SequenceTooShort : public Error {
 public:
  SequenceTooShort(const std::string& what, GreenValue deepest) : Error(what), deepest_(deepest) {}
  const GreenValue& deepest() const { return deepest_; }

 private:
  GreenValue deepest_;
};

/// log(t) / (d(i,i+n) (d_{i+n+1} - 1)); needs i+n+1 <= N.
double green_tail_bound(const MapSequence& seq, int i, int n);

/// green_tail_bound when d_{i+n+1} exists, otherwise the geometric fallback
/// log(t) / d(i,i+n) obtained from every unknown degree being at least 2.
double green_tail_bound_or_fallback(const MapSequence& seq, int i, int n);

/// G_{n,i} at a raw (not necessarily unit) vector.
GreenValue green_at_depth(const MapSequence& seq, int i, int n, cplx z, cplx w);

/// G_{n,i} at the shallowest depth whose tail bound is <= target_tail.
GreenValue green_eval(const MapSequence& seq, int i, cplx z, cplx w, double target_tail);
GreenValue green_eval(const MapSequence& seq, int i, const ProjectivePoint& p, double target_tail);

/// G_{0,i}, G_{1,i}, ..., G_{max_depth,i} at a raw vector.
std::vector<double> green_series(const MapSequence& seq, int i, cplx z, cplx w, int max_depth);

struct PullbackCheck {
  double residual;
  /// Sum of the tail bounds of the two Green values compared.
  double bound;
};

/// Compares G_n(P~_n z) / d_n with G_{n-1}(z), both evaluated down to the same
/// final stage n-1+depth.
PullbackCheck check_pullback(const MapSequence& seq, int n, const ProjectivePoint& z, int depth);

}  // namespace plab
