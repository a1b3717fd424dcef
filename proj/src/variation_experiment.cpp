#include "dsp/variation_experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "dsp/error.hpp"
#include "dsp/kernels.hpp"
#include "dsp/numerics.hpp"

namespace dsp {

void SpeedFamily::validate() const {
  if (k_list.empty()) throw InvalidArgument("speed family needs at least one k");
  for (int k : k_list)
    if (k < 2 || k % 2 != 0) throw InvalidArgument("speed family: k = " + std::to_string(k) + " is not even and >= 2");
}

std::vector<ResonanceParams> SpeedFamily::params(double delta) const {
  validate();
  std::vector<ResonanceParams> out;
  for (int k : k_list) out.push_back(ResonanceParams::make(k, delta));
  return out;
}

namespace {

double abs_eps(const ResonanceParams& P) { return std::fabs(P.eps()); }

std::int64_t floor_pow(const ResonanceParams& P, double expo) {
  // |eps|^{-expo} with |eps| = 1/(4k+2); guard the floor against roundoff
  double v = std::pow(static_cast<double>(4 * P.k + 2), expo);
  auto f = static_cast<std::int64_t>(std::floor(v + 1e-12 * v));
  return f;
}

}  // namespace

std::int64_t max_oscillation_points(const ResonanceParams& P) {
  return floor_pow(P, 1.0 / (1.0 + 2.0 * P.delta));
}

OscillationGrid oscillation_points(const ResonanceParams& P, std::int64_t count) {
  const std::int64_t F = max_oscillation_points(P);
  if (count < 1 || count > F)
    throw InvalidArgument("oscillation_points: count " + std::to_string(count) + " outside [1, " +
                          std::to_string(F) + "]");
  const std::int64_t F2 = floor_pow(P, 2.0 / (1.0 + 2.0 * P.delta));
  const Rational inv_beta = Rational(1, 1) / P.beta_exact;
  OscillationGrid g;
  double Y = std::pow(abs_eps(P), -2.0 / (1.0 + 2.0 * P.delta));
  g.J_lo = 0.5 * Y;
  g.J_hi = Y;
  g.spacing = static_cast<double>(F) / P.beta;
  for (std::int64_t n = 1; n <= count; ++n) {
    // beta y_n = F2 for n = 1, else F2 + n F + (n+1)/2
    Rational by = n == 1 ? Rational(F2, 1) : Rational(2 * (F2 + n * F) + n + 1, 2);
    g.beta_y.push_back(by);
    g.y_points.push_back((by * inv_beta).value());
    g.odd.push_back(n % 2 == 1);
  }
  return g;
}

double lemma_cutoff(double y, bool odd, const ResonanceParams& P) {
  if (!(y > 0.0)) throw InvalidArgument("lemma_cutoff needs y > 0");
  double c = 1.0 / (P.gamma * abs_eps(P) * std::pow(y, P.delta + 0.5));
  return odd ? c : 0.5 * c;
}

double H0_eval(double y, const ResonanceParams& P, double cutoff, bool freeze) {
  if (!(y > 0.0)) throw InvalidArgument("H0_eval needs y > 0");
  if (!(cutoff > 0.0)) throw InvalidArgument("H0_eval needs a positive cutoff");
  const double T = cutoff * std::pow(y, P.delta);
  const double base = P.beta * y;
  const double slope = freeze ? 0.0 : P.gamma * P.eps() * std::sqrt(y);
  auto f = [&](double tau) { return tau * std::exp(-0.5 * tau * tau) * frac(base + slope * tau); };
  std::vector<double> br{-T, T};
  if (slope != 0.0) {
    double a0 = base - std::fabs(slope) * T, a1 = base + std::fabs(slope) * T;
    for (double m = std::ceil(a0); m <= a1; m += 1.0) {
      double tau = (m - base) / slope;
      if (tau > -T && tau < T) br.push_back(tau);
    }
  }
  std::sort(br.begin(), br.end());
  KahanSum s;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    double a = br[i], b = br[i + 1];
    if (b - a <= 0.0) continue;
    // evaluate strictly inside so the jump sits on the piece boundary
    double shrink = 1e-13 * std::max(1.0, T);
    s.add(adaptive_simpson(f, a + shrink, b - shrink, 1e-13));
  }
  return s.value();
}

double delta_V(double x, const SourceProfile& src, const ResonanceParams& P, int quad_nodes) {
  if (src.is_zero()) return 0.0;
  return V_via_integral(x, src, P.lambda, P.delta, quad_nodes) -
         V_via_integral(x, src, P.lambda_tilde, P.delta, quad_nodes);
}

double source_frac_average(const SourceProfile& src, double a) {
  if (src.psi.empty()) return 0.0;
  // first moment of the piecewise-linear density, cell by cell
  KahanSum m1;
  for (std::size_t i = 0; i + 1 < src.psi.size(); ++i) {
    double x0 = src.start + src.step * static_cast<double>(i), x1 = x0 + src.step;
    double p0 = src.psi[i], p1 = src.psi[i + 1];
    m1.add(src.step * (x0 * (2.0 * p0 + p1) + x1 * (p0 + 2.0 * p1)) / 6.0);
  }
  // ((2 xi + a)) = 2 xi + a - floor(2 xi + a); the floor is constant on
  // [(m - a)/2, (m + 1 - a)/2)
  double lo = src.start, hi = src.start + src.step * static_cast<double>(src.psi.size() - 1);
  KahanSum fl;
  for (double m = std::floor(2.0 * lo + a); m <= std::floor(2.0 * hi + a); m += 1.0) {
    if (m == 0.0) continue;
    fl.add(m * (src.cumulative(0.5 * (m + 1.0 - a)) - src.cumulative(0.5 * (m - a))));
  }
  return 2.0 * m1.value() + a * src.mass - fl.value();
}

double delta_V_surrogate(double y, const SourceProfile& src, const ResonanceParams& P, double cutoff) {
  if (!(y > 0.0)) throw InvalidArgument("delta_V_surrogate needs y > 0");
  if (src.is_zero()) return 0.0;
  const double lt = P.lambda_tilde.value();
  const double T = cutoff * std::pow(y, P.delta);
  const double base = P.beta * y;
  const double slope = P.gamma * P.eps() * std::sqrt(y);
  auto f = [&](double tau) {
    return tau * std::exp(-0.5 * tau * tau) * source_frac_average(src, base + slope * tau);
  };
  // h has kinks where 2 lo + a or 2 hi + a crosses an integer; pieces of
  // width <= 1/8 resolve the Gaussian weight
  double lo = src.support_lo, hi = src.support_hi;
  std::vector<double> br{-T, T};
  for (double edge : {2.0 * lo, 2.0 * hi}) {
    double a0 = edge + base - std::fabs(slope) * T, a1 = edge + base + std::fabs(slope) * T;
    for (double m = std::ceil(a0); m <= a1; m += 1.0) {
      double tau = (m - edge - base) / slope;
      if (tau > -T && tau < T) br.push_back(tau);
    }
  }
  int pieces = static_cast<int>(std::ceil(2.0 * T / 0.125));
  for (int i = 1; i < pieces; ++i) br.push_back(-T + 2.0 * T * i / pieces);
  std::sort(br.begin(), br.end());
  double integral = gauss_legendre_composite(f, br, 8);
  const double q = static_cast<double>(P.lambda.q);
  return P.A(src.mass) + std::sqrt(2.0 / (std::numbers::pi * lt * y)) / (2.0 * q) * integral;
}

double tv_on_grid(const RealFn& fn, double a, double b, double step) {
  std::vector<double> xs = uniform_grid(a, b, step);
  std::vector<double> vals;
  vals.reserve(xs.size());
  for (double x : xs) vals.push_back(fn(x));
  return total_variation(vals);
}

TvSamples delta_V_tv(const SourceProfile& src, const ResonanceParams& P, double y_lo, double y_hi,
                     double step, int quad_nodes, unsigned workers) {
  TvSamples out;
  out.step = step;
  // ascending x, so from y_hi down to y_lo
  std::vector<double> ys = uniform_grid(y_lo, y_hi, step);
  out.xs.resize(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) out.xs[i] = -ys[ys.size() - 1 - i];
  out.values = parallel_map(out.xs.size(), workers, [&](std::size_t i) {
    return delta_V(out.xs[i], src, P, quad_nodes);
  });
  out.tv = total_variation(out.values);
  return out;
}

double study_step(const ResonanceParams& P, const StudyOptions& opt) {
  if (opt.step_override > 0.0) return opt.step_override;
  double spacing = static_cast<double>(max_oscillation_points(P)) / P.beta;
  return std::min(opt.max_step, spacing / opt.step_divisor);
}

VariationReport run_study_one(int k, const SourceProfile& src, const StudyOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  VariationReport r;
  r.k = k;
  try {
    if (!src.is_zero() && src.support_hi - src.support_lo > 0.25 + 1e-12)
      throw InvalidArgument("run_study: source support wider than 0.25");
    ResonanceParams P = ResonanceParams::make(k, opt.delta);
    r.epsilon = P.epsilon;
    r.A_term = P.A(src.mass);
    std::int64_t count = std::min(opt.alternation_count, max_oscillation_points(P));
    OscillationGrid g = oscillation_points(P, count);
    r.y_lo = g.J_lo;
    r.y_hi = g.J_hi;
    r.sample_step = study_step(P, opt);
    for (std::int64_t n = 1; n <= count; ++n) {
      AlternationRow row;
      row.n = n;
      row.y = g.y_points[n - 1];
      row.odd = g.odd[n - 1];
      row.cutoff = lemma_cutoff(row.y, row.odd, P);
      row.H0 = H0_eval(row.y, P, row.cutoff);
      r.alternation.push_back(row);
    }
    TvSamples tv = delta_V_tv(src, P, r.y_lo, r.y_hi, r.sample_step, opt.quad_nodes, opt.workers);
    r.tv_value = tv.tv;
    if (opt.keep_samples) {
      r.xs = std::move(tv.xs);
      r.dV = std::move(tv.values);
    }
  } catch (const Error& e) {
    r.ok = false;
    r.error = e.what();
  }
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<VariationReport> run_study(const SpeedFamily& family, const SourceProfile& src,
                                       const StudyOptions& opt) {
  std::vector<VariationReport> out;
  for (int k : family.k_list) out.push_back(run_study_one(k, src, opt));
  return out;
}

double translation_check(const SecondComponent& V, double dx, double x_lo, double x_hi, double delta) {
  if (dx < 0.0 || dx > 2.0) throw InvalidArgument("translation_check: dx must lie in [0, 2]");
  const GridFunction& g = V.profile;
  const double top = g.x_at(g.size() - 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.x_at(i);
    if (x < x_lo || x > x_hi || x + dx > top) continue;
    worst = std::max(worst, std::fabs(g.at(x + dx) - g.values[i]) * std::pow(std::fabs(x), 1.0 - delta));
  }
  return worst;
}

}  // namespace dsp
