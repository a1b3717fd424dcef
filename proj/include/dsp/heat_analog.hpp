#pragma once

// Heat equation driven by pulse trains: a moving line source (closed form),
// pulses at the integer times n located at -sigma n, and the same pulses
// snapped to the integer lattice at -floor(sigma n).

#include <span>
#include <vector>

#include "dsp/numerics.hpp"
#include "dsp/time_window.hpp"

namespace dsp {

enum class PulseVariant { line_source, discrete_points, lattice_points };

struct PulseTrainSpec {
  double sigma = 1.0;
  PulseVariant variant = PulseVariant::discrete_points;
  double truncation_delta = 0.1;

  void validate() const;
};

struct DecayFitReport {
  int m = 2;
  double fitted_exponent = 0.0;
  double y_lo = 0.0;  // window in y < 0
  double y_hi = 0.0;
  std::vector<double> ys;
  std::vector<double> deviations;  // |Phi(y) - 1/sigma|
};

/// sigma^{-1} e^{-sigma y} for y >= 0, sigma^{-1} for y <= 0.
double phi_profile(double y, double sigma);

/// Derivative of phi_profile away from the kink at y = 0.
double phi_deriv(double y, double sigma);

/// Window in n for sums over G(n, y + sigma n + O(1)).
TimeWindow heat_window(double y, double sigma, double delta, double scale = 1.0);

/// Phi(y) = sum_{n >= 1} G(n, y + sigma n).
double discrete_time_profile(double y, double sigma, double delta = 0.1, double scale = 1.0);

/// Psi(y) = sum_{n >= 1} G(n, y + floor(sigma n)). The Rational overload
/// computes floor(sigma n) exactly.
double lattice_profile(double y, double sigma, double delta = 0.1, double scale = 1.0);
double lattice_profile(double y, const Rational& sigma, double delta = 0.1, double scale = 1.0);

/// Psi(y) - Phi(y) as one sum of per-n differences.
double resonance_gap(double y, double sigma, double delta = 0.1, double scale = 1.0);
double resonance_gap(double y, const Rational& sigma, double delta = 0.1, double scale = 1.0);

/// Continuous-time approximation of the gap for sigma = 1 + epsilon:
///   -int_0^inf G_x(t, y + sigma t) ((epsilon t)) dt.
double resonance_gap_integral(double y, double epsilon, double delta = 0.1);

/// Plain sums over 1 <= n <= n_max with no windowing (reference path).
double discrete_time_profile_full(double y, double sigma, std::int64_t n_max);
double lattice_profile_full(double y, const Rational& sigma, std::int64_t n_max);

/// Grid total variation of Psi^{(1+epsilon)} on [-epsilon^-2, -epsilon^-2/2].
double heat_tv_demo(double epsilon, double delta, double step, unsigned workers = 1);

/// Log-log fit of |Phi(y) - 1/sigma| against |y| over the given y < 0.
/// Deviations below `floor` are replaced by it before fitting.
DecayFitReport profile_decay_fit(double sigma, std::span<const double> ys, double delta = 0.1,
                                 double floor = 1e-13);

}  // namespace dsp
