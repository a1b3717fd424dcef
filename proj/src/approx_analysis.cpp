#include "dsp/approx_analysis.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "dsp/error.hpp"
#include "dsp/kernels.hpp"
#include "dsp/numerics.hpp"

namespace dsp {

ResonanceParams ResonanceParams::make(int k, double delta) {
  if (k < 2 || k % 2 != 0) throw InvalidArgument("resonance family needs an even k >= 2");
  if (!(delta > 0.0 && delta < 0.5)) throw InvalidArgument("delta must lie in (0, 1/2)");
  ResonanceParams r;
  r.k = k;
  r.delta = delta;
  r.lambda = RationalSpeed(1, 2, RationalSpeed::Role::base);
  r.lambda_tilde = RationalSpeed(k, 2 * k + 1, RationalSpeed::Role::perturbed);
  r.epsilon = r.lambda_tilde.rational() - r.lambda.rational();
  r.beta_exact = Rational(2, 1) * r.lambda.rational() / r.lambda_tilde.rational();
  r.beta = r.beta_exact.value();
  r.gamma = 2.0 / std::pow(r.lambda_tilde.value(), 1.5);
  return r;
}

double ResonanceParams::A(double mass) const {
  return -eps() / (lambda.value() * lambda_tilde.value()) * mass;
}

void ErrorBudget::validate() const {
  if (E_term < 0.0 || tail_term < 0.0 || quadrature_term < 0.0)
    throw InvalidArgument("error budget components must be nonnegative");
}

ErrorBudget error_budget(double y, double eps, std::int64_t q, double delta, double c_q,
                         double c_eps, double tail, double quad) {
  if (c_q < 0.0 || c_eps < 0.0 || !(y > 0.0))
    throw InvalidArgument("error budget needs y > 0 and nonnegative constants");
  ErrorBudget b;
  double qd = static_cast<double>(q);
  b.E_term = c_q * qd / std::pow(y, 1.0 - delta) + c_eps * std::fabs(eps) * qd * qd / std::pow(y, 0.5 - delta);
  b.tail_term = tail;
  b.quadrature_term = quad;
  b.validate();
  return b;
}

CltScan clt_error_scan(std::span<const std::int64_t> n_list, double delta, unsigned workers) {
  if (!std::is_sorted(n_list.begin(), n_list.end()))
    throw InvalidArgument("clt_error_scan: n_list must be sorted ascending");
  CltScan out;
  std::vector<double> errs = parallel_map(n_list.size(), workers, [&](std::size_t i) {
    std::int64_t n = n_list[i];
    auto kmax = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(n), 0.5 + delta)));
    kmax = std::min(kmax, n);
    double worst = 0.0;
    for (std::int64_t k = -kmax; k <= kmax; ++k) {
      if (((n + k) & 1) != 0) continue;
      worst = std::max(worst, kernel_sample(n, k).abs_error);
    }
    return worst;
  });
  std::vector<double> ns, es;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    out.rows.push_back({n_list[i], errs[i]});
    if (errs[i] > 0.0) {
      ns.push_back(static_cast<double>(n_list[i]));
      es.push_back(errs[i]);
    }
  }
  if (ns.size() >= 2) out.slope = loglog_fit(ns, es).slope;
  return out;
}

double tail_mass_discrete(double y, double lambda, double delta) {
  if (!(y < 0.0)) throw InvalidArgument("tail_mass_discrete needs y < 0");
  if (!(lambda > 0.0)) throw InvalidArgument("tail_mass_discrete needs lambda > 0");
  const double ay = -y;
  RealInterval iv = asymptotic_interval(ay, lambda, delta);
  const auto n_end = static_cast<std::int64_t>(std::floor(8.0 * ay));
  KahanSum s;
  for (std::int64_t n = 1; n <= n_end; ++n) {
    double nd = static_cast<double>(n);
    if (nd >= iv.lo && nd <= iv.hi) continue;
    s.add(binom_kernel(n, ifloor(y + lambda * nd)));
  }
  // Remainder n > 8|y|: the (2/3)^{n/4} bound, and for slow speeds the
  // Hoeffding bound exp(-k^2/2n) with k >= (lambda - 1/8) n, whichever is larger.
  const double N = static_cast<double>(n_end + 1);
  const double r1 = std::pow(2.0 / 3.0, 0.25);
  double rem = std::pow(2.0 / 3.0, N / 4.0) / (1.0 - r1);
  if (lambda < 1.0) {
    double c = std::max(lambda - 0.125, 1e-3);
    double r2 = std::exp(-0.5 * c * c);
    rem = std::max(rem, std::exp(-0.5 * c * c * N) / (1.0 - r2));
  }
  s.add(rem);
  return s.value();
}

namespace {

// max_u (2u + m)^m e^{-u^2/2}, attained where u^2 + (m/2) u - m = 0.
double hermite_envelope(int m) {
  if (m == 0) return 1.0;
  double md = m;
  double u = 0.5 * (-0.5 * md + std::sqrt(0.25 * md * md + 4.0 * md));
  return std::pow(2.0 * u + md, md) * std::exp(-0.5 * u * u);
}

double abs_deriv_along(double t, double y, double lambda, int order) {
  if (t <= 0.0) return 0.0;
  double x = y + lambda * t;
  if (order == 0) return heat_kernel(t, x);
  return std::fabs(heat_kernel_deriv(t, x, order, Axis::space));
}

double kronrod(double y, double lambda, int order, double a, double b) {
  if (!(b > a)) return 0.0;
  auto f = [&](double t) { return abs_deriv_along(t, y, lambda, order); };
  // Split into pieces of a few Gaussian widths so the adaptive rule sees the bump.
  double width = std::max(1.0, 2.0 * std::sqrt(std::max(1.0, -y / lambda)));
  auto pieces = static_cast<int>(std::min(4000.0, std::ceil((b - a) / width)));
  pieces = std::max(pieces, 1);
  KahanSum s;
  for (int i = 0; i < pieces; ++i) {
    double lo = a + (b - a) * i / pieces, hi = a + (b - a) * (i + 1) / pieces;
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-13, &err);
    if (!std::isfinite(v)) throw QuadratureFailure("tail_mass_heat: non-finite integral");
    s.add(v);
  }
  return s.value();
}

}  // namespace

double tail_mass_heat_outside(double y, double lambda, int order, double lo, double hi) {
  if (!(y < 0.0)) throw InvalidArgument("tail_mass_heat needs y < 0");
  if (order < 0) throw InvalidArgument("tail_mass_heat needs order >= 0");
  if (!(lambda > 0.0)) throw InvalidArgument("tail_mass_heat needs lambda > 0");
  const double T = 4.0 * (-y) / lambda;
  KahanSum s;
  if (lo > 0.0) s.add(kronrod(y, lambda, order, 0.0, std::min(lo, T)));
  if (hi < T) s.add(kronrod(y, lambda, order, std::max(hi, 0.0), T));
  double start = std::max(T, hi);
  if (std::isfinite(start)) {
    // Beyond T, lambda t - |y| >= 3 lambda t / 4, so with u = x / (2 sqrt t),
    // |d^m G| <= (2 sqrt t)^{-m} (2|u| + m)^m e^{-u^2} / (2 sqrt(pi t)) and
    // e^{-u^2/2} <= e^{-9 lambda^2 t / 128}.
    double rate = 9.0 * lambda * lambda / 128.0;
    double pref = hermite_envelope(order) * std::pow(2.0 * std::sqrt(start), -order) /
                  (2.0 * std::sqrt(std::numbers::pi * start));
    s.add(pref * std::exp(-rate * start) / rate);
  }
  return s.value();
}

double tail_mass_heat(double y, double lambda, double delta, int order) {
  RealInterval iv = asymptotic_interval(-y, lambda, delta);
  return tail_mass_heat_outside(y, lambda, order, iv.lo, iv.hi);
}

std::pair<double, double> frac_identity_check(double z, std::int64_t p, std::int64_t q) {
  if (q <= 0) throw InvalidArgument("frac identity needs q > 0");
  if (std::gcd(p, q) != 1) throw InvalidArgument("frac identity needs gcd(p, q) = 1");
  KahanSum lhs;
  const double qd = static_cast<double>(q);
  for (std::int64_t j = 1; j <= q; ++j) lhs.add(frac(z + static_cast<double>(floor_div(p * j, q)) +
                                                     static_cast<double>(p * j - q * floor_div(p * j, q)) / qd));
  double rhs = frac(qd * z) + (qd - 1.0) / 2.0;
  return {lhs.value(), rhs};
}

SumResult w_probe_sum(const ProbeContext& ctx) {
  SumResult out;
  TimeWindow w = ctx.window();
  // 2 G(n/2, k) <= 2 e^{-k^2/2n} / sqrt(2 pi n) < e^{-k^2/2n}
  out.tail_bound = w.tail_bound;
  KahanSum s;
  for (std::int64_t n = std::max<std::int64_t>(1, w.lo); n <= w.hi; ++n) {
    s.add(2.0 * heat_kernel(0.5 * static_cast<double>(n), static_cast<double>(ctx.floor_z_n(n))));
    ++out.terms;
  }
  out.value = s.value();
  return out;
}

double w_probe(const ProbeContext& ctx) { return w_probe_sum(ctx).value; }

double w_probe_full(const ProbeContext& ctx, std::int64_t n_max) {
  KahanSum s;
  for (std::int64_t n = 1; n <= n_max; ++n)
    s.add(2.0 * heat_kernel(0.5 * static_cast<double>(n), static_cast<double>(ctx.floor_z_n(n))));
  return s.value();
}

namespace {

void require_family(const RationalSpeed& s) {
  bool base = s.p == 1 && s.q == 2;
  bool pert = s.q == 2 * s.p + 1 && s.p % 2 == 0;
  if (!base && !pert)
    throw InvalidArgument("parity_sum: speed " + std::to_string(s.p) + "/" + std::to_string(s.q) +
                          " is neither 1/2 nor k/(2k+1) with k even");
}

double parity_terms(const ProbeContext& ctx, std::int64_t lo, std::int64_t hi) {
  KahanSum s;
  for (std::int64_t n = std::max<std::int64_t>(1, lo); n <= hi; ++n) {
    std::int64_t f = ctx.floor_z_n(n);
    if (((n - f) & 1) == 0) continue;
    s.add(heat_kernel_dx(0.5 * static_cast<double>(n), ctx.z_n(n)));
  }
  return s.value();
}

}  // namespace

double parity_sum(const ProbeContext& ctx) {
  require_family(ctx.speed);
  TimeWindow w = ctx.window();
  if (w.empty()) return 0.0;
  return parity_terms(ctx, w.lo, w.hi);
}

double parity_sum_full(const ProbeContext& ctx, std::int64_t n_max) {
  require_family(ctx.speed);
  return parity_terms(ctx, 1, n_max);
}

double v_minus_w(const ProbeContext& ctx) { return v_probe(ctx) - w_probe(ctx); }

double decomposition_residual(const ProbeContext& ctx) {
  return v_probe(ctx) - w_probe(ctx) - 2.0 * parity_sum(ctx);
}

namespace {

// Composite Simpson of tau e^{-tau^2/2} ((arg(tau))) split where arg crosses
// an integer. On each piece the integer part is fixed from the midpoint, so
// endpoint evaluations cannot land on the wrong side of a jump. Panels are
// shared out by length with at least `min_panels` per piece.
double simpson_frac(const std::function<double(double)>& arg, std::vector<double> br, int panels,
                    int min_panels) {
  std::sort(br.begin(), br.end());
  const double len = br.back() - br.front();
  KahanSum s;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    double a = br[i], b = br[i + 1];
    if (b <= a) continue;
    double m_int = std::floor(arg(0.5 * (a + b)));
    auto f = [&](double tau) { return tau * std::exp(-0.5 * tau * tau) * (arg(tau) - m_int); };
    int m = static_cast<int>(std::ceil(panels * (b - a) / len));
    m = std::max(min_panels, m + (m % 2));
    s.add(simpson(f, a, b, m));
  }
  return s.value();
}

}  // namespace

double w_diff_closed_form(double x, double xi, const ResonanceParams& P, double tau_cut,
                          bool freeze) {
  if (!(x < 0.0)) throw InvalidArgument("w_diff_closed_form needs x < 0");
  if (!(tau_cut > 0.0)) throw InvalidArgument("tau cutoff must be positive");
  const double y = -x;
  const double q = static_cast<double>(P.lambda.q);
  const double lt = P.lambda_tilde.value();
  const double eps = P.eps();
  const double T = tau_cut * std::pow(y, P.delta);
  const double base = q * xi + q * y - q * eps * y / lt;
  const double slope = freeze ? 0.0 : q * eps * std::sqrt(y / lt) / lt;
  std::function<double(double)> arg = [&](double tau) { return base + slope * tau; };
  std::vector<double> br{-T, T};
  if (slope != 0.0) {
    double a0 = arg(-T), a1 = arg(T);
    double lo = std::min(a0, a1), hi = std::max(a0, a1);
    for (double m = std::ceil(lo); m <= hi; m += 1.0) {
      double tau = (m - base) / slope;
      if (tau > -T && tau < T) br.push_back(tau);
    }
  }
  double coarse = simpson_frac(arg, br, 2000, 8);
  double fine = simpson_frac(arg, br, 4000, 16);
  if (std::fabs(coarse - fine) > 1e-8)
    throw QuadratureFailure("w_diff_closed_form: Simpson refinement moved the integral by " +
                            std::to_string(std::fabs(coarse - fine)));
  double coef = std::sqrt(2.0 / (std::numbers::pi * lt * y)) / q;
  return 2.0 / P.lambda.value() - 2.0 / lt - coef * fine;
}

std::pair<double, double> technical_lhs_rhs(double z, const ResonanceParams& P) {
  const std::int64_t q = P.lambda.q;
  const double qd = static_cast<double>(q);
  const double lt = P.lambda_tilde.value();
  const double eps = P.eps();
  WindowSpec spec;
  spec.offset = z;
  spec.rate = lt * qd;
  spec.halfwidth = 0.0;
  spec.spread = 2.0 * qd;  // G(m q/2, x) ~ exp(-x^2 / (2 q m))
  spec.delta = P.delta;
  TimeWindow w = summation_window(spec);
  KahanSum lhs;
  for (std::int64_t m = std::max<std::int64_t>(1, w.lo); m <= w.hi; ++m) {
    double md = static_cast<double>(m);
    KahanSum inner;
    for (std::int64_t j = 1; j <= q; ++j) inner.add(frac(z + md * qd * eps + lt * static_cast<double>(j)));
    lhs.add(heat_kernel_dx(0.5 * md * qd, z + lt * md * qd) * inner.value());
  }
  // rhs on the same window, split where q (z + s q eps) crosses an integer.
  double a = std::max(1e-9, static_cast<double>(w.lo) - 1.0);
  double b = static_cast<double>(w.hi) + 1.0;
  auto g = [&](double s) { return qd * (z + s * qd * eps); };
  std::vector<double> br{a, b};
  double g0 = g(a), g1 = g(b);
  double slope = qd * qd * eps;
  for (double m = std::ceil(std::min(g0, g1)); m <= std::max(g0, g1); m += 1.0) {
    double s = (m / qd - z) / (qd * eps);
    if (s > a && s < b) br.push_back(s);
  }
  (void)slope;
  std::sort(br.begin(), br.end());
  std::vector<double> fine;
  double piece = std::max(0.5, std::sqrt(b) / 8.0);
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    int m = std::max(1, static_cast<int>(std::ceil((br[i + 1] - br[i]) / piece)));
    for (int j = 0; j < m; ++j) fine.push_back(br[i] + (br[i + 1] - br[i]) * j / m);
  }
  fine.push_back(b);
  auto integrand = [&](double s) {
    return heat_kernel_dx(0.5 * s * qd, z + lt * s * qd) * frac(g(s));
  };
  double rhs = gauss_legendre_composite(integrand, fine, 16);
  return {lhs.value(), rhs};
}

}  // namespace dsp
