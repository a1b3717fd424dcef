#pragma once

// Executable versions of the asymptotic scaffolding: local-CLT error of the
// binomial kernel, tail masses outside the time window, the fractional-sum
// identity, the heat-kernel surrogate w of the probe kernel, parity sums and
// the closed-form difference for perturbed speeds.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dsp/dsp_construct.hpp"
#include "dsp/time_window.hpp"

namespace dsp {

/// lambda = 1/2 against lambda~ = k/(2k+1), k even.
struct ResonanceParams {
  RationalSpeed lambda{1, 2, RationalSpeed::Role::base};
  int k = 2;
  RationalSpeed lambda_tilde{2, 5, RationalSpeed::Role::perturbed};
  Rational epsilon{-1, 10};  // lambda~ - lambda = -1/(4k+2)
  Rational beta_exact{5, 2};  // 2 lambda / lambda~
  double beta = 2.5;
  double gamma = 0.0;         // 2 / lambda~^{3/2}
  double delta = 0.1;

  static ResonanceParams make(int k, double delta = 0.1);
  double eps() const { return epsilon.value(); }
  /// A(eps) = -eps / (lambda lambda~) times the source mass.
  double A(double mass) const;
};

/// E(y; eps, q) = c_q q / y^{1-delta} + c_eps |eps| q^2 / y^{1/2-delta}.
struct ErrorBudget {
  double E_term = 0.0;
  double tail_term = 0.0;
  double quadrature_term = 0.0;

  double total() const { return E_term + tail_term + quadrature_term; }
  void validate() const;
};
ErrorBudget error_budget(double y, double eps, std::int64_t q, double delta, double c_q,
                         double c_eps, double tail = 0.0, double quad = 0.0);

struct CltRow {
  std::int64_t n;
  double max_error;
};
struct CltScan {
  std::vector<CltRow> rows;
  double slope = 0.0;  // log-log fit of max_error against n (needs two rows)
};
/// max over |k| <= n^{1/2+delta} with n + k even of |K_{n,k} - 2 G(n/2, k)|.
CltScan clt_error_scan(std::span<const std::int64_t> n_list, double delta = 0.1,
                       unsigned workers = 1);

/// Sum of K_{n, [[y + lambda n]]} over n outside I(|y|; lambda, delta), summed
/// to n <= 8|y| with a geometric bound for the rest.
double tail_mass_discrete(double y, double lambda, double delta);

/// Integral of |d_x^order G(t, y + lambda t)| over t >= 0 outside
/// I(|y|; lambda, delta): adaptive Gauss-Kronrod up to t = 4|y|/lambda and an
/// exponential bound beyond.
double tail_mass_heat(double y, double lambda, double delta, int order);
/// Same over t outside an explicit interval [lo, hi] (hi may be +inf).
double tail_mass_heat_outside(double y, double lambda, int order, double lo, double hi);

/// (sum_{j=1}^q ((z + p j / q)), ((q z)) + (q - 1)/2).
std::pair<double, double> frac_identity_check(double z, std::int64_t p, std::int64_t q);

/// w(x; xi) = 2 sum_{n >= 1} G(n/2, [[z_n]]).
SumResult w_probe_sum(const ProbeContext& ctx);
double w_probe(const ProbeContext& ctx);
double w_probe_full(const ProbeContext& ctx, std::int64_t n_max);

/// sum over the window, n - [[z_n]] odd, of G_x(n/2, z_n). Only lambda = 1/2
/// and lambda = k/(2k+1) with k even are accepted.
double parity_sum(const ProbeContext& ctx);
double parity_sum_full(const ProbeContext& ctx, std::int64_t n_max);

double v_minus_w(const ProbeContext& ctx);
/// v - w - 2 parity_sum.
double decomposition_residual(const ProbeContext& ctx);

/// 2/lambda - 2/lambda~ - (1/q) sqrt(2/(pi lambda~ y)) int_{|tau| < tau_cut y^delta}
///   tau e^{-tau^2/2} ((q xi + q y - (q eps/lambda~)(y - tau sqrt(y/lambda~)))) dtau,
/// y = -x. `freeze` drops the tau dependence inside the fractional part.
double w_diff_closed_form(double x, double xi, const ResonanceParams& params, double tau_cut = 3.0,
                          bool freeze = false);

/// lhs = sum_{m >= 1} G_x(m q/2, z + lambda~ m q) sum_{j=1}^q ((z + m q eps + lambda~ j)),
/// rhs = int_0^inf G_x(s q/2, z + lambda~ s q) ((q (z + s q eps))) ds, q = 2.
std::pair<double, double> technical_lhs_rhs(double z, const ResonanceParams& params);

}  // namespace dsp
