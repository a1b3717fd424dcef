#pragma once

#include <cstdint>

namespace dsp {

/// Integer summation range [lo, hi] with a bound on everything left out.
struct TimeWindow {
  std::int64_t lo = 1;
  std::int64_t hi = 0;
  double tail_bound = 0.0;

  bool empty() const { return hi < lo; }
  std::int64_t size() const { return empty() ? 0 : hi - lo + 1; }
  /// Same center, half-width scaled by `factor` (lo clamped to 1).
  TimeWindow enlarged(double factor) const;
};

/// I(y; lambda, delta) = [y/lambda - y^{1/2+delta}, y/lambda + y^{1/2+delta}].
struct RealInterval {
  double lo;
  double hi;
};
RealInterval asymptotic_interval(double y, double lambda, double delta);

/// Sums over n >= 1 whose terms are bounded by
///   exp(-max(0, |offset + rate n| - halfwidth)^2 / (spread n)).
/// spread = 2 covers K_{n,k} (Hoeffding) and G(n/2, k); spread = 4 covers
/// G(n, x).
struct WindowSpec {
  double offset = 0.0;
  double rate = 1.0;
  double halfwidth = 1.0;
  double spread = 2.0;
  double delta = 0.1;
  double log_tol = 45.0;  // terms below exp(-log_tol) are dropped
};

/// Union of the asymptotic interval (downstream only) and the range where
/// the Gaussian-type bound exceeds exp(-log_tol); tail_bound sums the bound
/// over the excluded indices.
TimeWindow summation_window(const WindowSpec& spec);

/// Bound on the sum of the excluded terms of an arbitrary window.
double window_tail_bound(const WindowSpec& spec, std::int64_t lo, std::int64_t hi);

}  // namespace dsp
