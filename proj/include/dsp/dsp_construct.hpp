#pragma once

// Second component V of the discrete shock profile, built from the binomial
// Green's kernel by Duhamel's principle, and the probe kernel v(x; xi) of
// the representation V(x) = -1/2 int psi(xi) v(x; xi) dxi.

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "dsp/scalar_profile.hpp"
#include "dsp/time_window.hpp"

namespace dsp {

struct GridFunction {
  double start = 0.0;
  double step = 1.0;
  std::vector<double> values;

  void validate() const;
  double x_at(std::size_t i) const { return start + step * static_cast<double>(i); }
  std::size_t size() const { return values.size(); }
  /// Linear interpolation, exact at the nodes; throws outside the grid.
  double at(double x) const;
};

/// Evaluation point of the probe kernel. z_n = x + lambda (n + 1) - xi.
struct ProbeContext {
  double x = 0.0;
  double xi = 0.0;
  RationalSpeed speed;
  double delta = 0.1;
  double window_scale = 1.0;  // > 1 widens the summation window

  ProbeContext() = default;
  ProbeContext(double x_, double xi_, RationalSpeed s, double d = 0.1)
      : x(x_), xi(xi_), speed(s), delta(d) {}

  double lambda() const { return speed.value(); }
  double z() const { return x - xi + lambda(); }
  double z_n(std::int64_t n) const { return x + lambda() * static_cast<double>(n + 1) - xi; }
  /// floor(z_n) from floor(q (x - xi)) and exact integer arithmetic.
  std::int64_t floor_z_n(std::int64_t n) const;
  /// Asymptotic interval I(|z|; lambda, delta) intersected with n >= 1
  /// (empty upstream, z >= 0).
  TimeWindow asymptotic_window() const;
  /// Summation window actually used: the asymptotic interval joined with
  /// the range where the Gaussian bound exceeds e^{-45}; carries the bound
  /// on the terms left out.
  TimeWindow window() const;
};

struct SumResult {
  double value = 0.0;
  double tail_bound = 0.0;
  std::int64_t terms = 0;
};

/// sum_{m = start-1}^{n-1} sum_k sources(m, j - k) K_{n-1-m, k}.
double duhamel_sum(const std::map<std::pair<std::int64_t, std::int64_t>, double>& sources,
                   std::int64_t n, std::int64_t j, std::int64_t start);

/// V(x) = sum_{n >= 1} sum_k H(x - k + lambda n) K_{n-1,k}.
SumResult V_lambda_sum(double x, const WindowAverage& H, const RationalSpeed& lambda,
                       double delta = 0.1, double window_scale = 1.0);
double V_lambda(double x, const WindowAverage& H, const RationalSpeed& lambda, double delta = 0.1);

/// v(x; xi) = sum_{n >= 0} (K_{n, [[z_n]]} + K_{n, [[z_n]] + 1}); each pair is
/// added before accumulation.
SumResult v_probe_sum(const ProbeContext& ctx);
double v_probe(const ProbeContext& ctx);
/// Same sum over 0 <= n <= n_max without windowing.
double v_probe_full(const ProbeContext& ctx, std::int64_t n_max);

/// -1/2 int psi(xi) v(x; xi) dxi. v is piecewise constant in xi with jumps on
/// x + Z/q, so the integral splits there; each piece uses Gauss-Legendre
/// with `quad_nodes` points, and the result is checked against twice as
/// many nodes (QuadratureFailure if they differ by more than 1e-8).
double V_via_integral(double x, const SourceProfile& src, const RationalSpeed& lambda,
                      double delta = 0.1, int quad_nodes = 8);

struct SecondComponent {
  GridFunction profile;
  RationalSpeed speed;
  SourceProfile source;
  double tail_bound = 0.0;  // largest certified truncation bound over samples

  double operator()(double x) const { return profile.at(x); }
};

/// Samples V on [x_lo, x_hi] with step 1/(q per_cell) so that x - lambda and
/// x +- 1 stay on the grid.
SecondComponent build_second_component(const SourceProfile& src, const RationalSpeed& lambda,
                                       double x_lo, double x_hi, int per_cell = 2,
                                       double delta = 0.1, unsigned workers = 1);

/// sup over grid x of |V(x - lambda) - (V(x+1) + V(x-1))/2 + (G(x+1) - G(x-1))/2|
/// with G = g o U.
double dsp2_residual(const ScalarDSP& U, const SecondComponent& V, const RealFn& g);
/// Variant driven directly by the source: G(s) = int_{-inf}^s psi.
double dsp2_residual(const SecondComponent& V);

}  // namespace dsp
