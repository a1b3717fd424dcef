#include "dsp/dsp_construct.hpp"

#include <algorithm>
#include <cmath>

#include "dsp/error.hpp"
#include "dsp/kernels.hpp"
#include "dsp/numerics.hpp"

namespace dsp {

void GridFunction::validate() const {
  if (!(step > 0.0)) throw InvalidArgument("grid step must be positive");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidArgument("grid function holds a non-finite value");
}

double GridFunction::at(double x) const {
  if (values.empty()) throw InvalidArgument("empty grid function");
  double pos = (x - start) / step;
  double r = std::round(pos);
  if (std::fabs(pos - r) < 1e-9 && r >= 0.0 && r < static_cast<double>(values.size()))
    return values[static_cast<std::size_t>(r)];
  if (pos < 0.0 || pos > static_cast<double>(values.size() - 1))
    throw InvalidArgument("grid function evaluated outside its range");
  auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= values.size()) return values.back();
  double t = pos - static_cast<double>(i);
  return values[i] + t * (values[i + 1] - values[i]);
}

std::int64_t ProbeContext::floor_z_n(std::int64_t n) const {
  const std::int64_t A = ifloor(static_cast<double>(speed.q) * (x - xi));
  return floor_div(A + speed.p * (n + 1), speed.q);
}

TimeWindow ProbeContext::asymptotic_window() const {
  TimeWindow w;
  double zz = z();
  if (zz >= 0.0) return w;
  RealInterval iv = asymptotic_interval(-zz, lambda(), delta);
  w.lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(iv.lo)));
  w.hi = static_cast<std::int64_t>(std::floor(iv.hi));
  return w;
}

namespace {

WindowSpec probe_spec(const ProbeContext& ctx) {
  WindowSpec s;
  s.offset = ctx.z();
  s.rate = ctx.lambda();
  s.halfwidth = 1.0;
  s.spread = 2.0;
  s.delta = ctx.delta;
  return s;
}

}  // namespace

TimeWindow ProbeContext::window() const {
  WindowSpec s = probe_spec(*this);
  TimeWindow w = summation_window(s);
  if (window_scale != 1.0) {
    w = w.enlarged(window_scale);
    w.tail_bound = window_tail_bound(s, w.lo, w.hi);
  }
  return w;
}

double duhamel_sum(const std::map<std::pair<std::int64_t, std::int64_t>, double>& sources,
                   std::int64_t n, std::int64_t j, std::int64_t start) {
  KahanSum s;
  for (const auto& [key, val] : sources) {
    auto [m, cell] = key;
    if (m < start - 1 || m > n - 1 || val == 0.0) continue;
    s.add(val * binom_kernel(n - 1 - m, j - cell));
  }
  return s.value();
}

SumResult V_lambda_sum(double x, const WindowAverage& H, const RationalSpeed& lambda, double delta,
                       double window_scale) {
  SumResult out;
  const double a = H.support_lo(), b = H.support_hi();
  const double lam = lambda.value();
  WindowSpec s;
  s.offset = x - 0.5 * (a + b);
  s.rate = lam;
  s.halfwidth = 0.5 * (b - a) + 1.0;
  s.spread = 2.0;
  s.delta = delta;
  TimeWindow w = summation_window(s);
  if (window_scale != 1.0) w = w.enlarged(window_scale);
  const double per_n = std::ceil(b - a) + 2.0;
  out.tail_bound = window_tail_bound(s, w.lo, w.hi) * per_n * H.sup_abs();
  KahanSum sum;
  auto add_level = [&](std::int64_t n) {
    double shift = x + lam * static_cast<double>(n);
    auto kmin = static_cast<std::int64_t>(std::ceil(shift - b));
    auto kmax = static_cast<std::int64_t>(std::floor(shift - a));
    for (std::int64_t k = kmin; k <= kmax; ++k) {
      double kv = binom_kernel(n - 1, k);
      if (kv == 0.0) continue;
      sum.add(H(shift - static_cast<double>(k)) * kv);
      ++out.terms;
    }
  };
  if (w.lo > 1) add_level(1);
  for (std::int64_t n = w.lo; n <= w.hi; ++n) add_level(n);
  out.value = sum.value();
  return out;
}

double V_lambda(double x, const WindowAverage& H, const RationalSpeed& lambda, double delta) {
  return V_lambda_sum(x, H, lambda, delta).value;
}

SumResult v_probe_sum(const ProbeContext& ctx) {
  SumResult out;
  TimeWindow w = ctx.window();
  out.tail_bound = 2.0 * w.tail_bound;
  KahanSum s;
  auto add = [&](std::int64_t n) {
    std::int64_t f = ctx.floor_z_n(n);
    double pair = binom_kernel(n, f) + binom_kernel(n, f + 1);
    s.add(pair);
    ++out.terms;
  };
  add(0);
  for (std::int64_t n = std::max<std::int64_t>(1, w.lo); n <= w.hi; ++n) add(n);
  out.value = s.value();
  return out;
}

double v_probe(const ProbeContext& ctx) { return v_probe_sum(ctx).value; }

double v_probe_full(const ProbeContext& ctx, std::int64_t n_max) {
  KahanSum s;
  for (std::int64_t n = 0; n <= n_max; ++n) {
    std::int64_t f = ctx.floor_z_n(n);
    s.add(binom_kernel(n, f) + binom_kernel(n, f + 1));
  }
  return s.value();
}

namespace {

// Breakpoints of xi -> v(x; xi) inside [lo, hi], together with both ends.
std::vector<double> probe_breakpoints(double x, std::int64_t q, double lo, double hi) {
  std::vector<double> br{lo};
  const double qd = static_cast<double>(q);
  auto j0 = static_cast<std::int64_t>(std::floor((lo - x) * qd));
  for (std::int64_t j = j0;; ++j) {
    double xi = x + static_cast<double>(j) / qd;
    if (xi >= hi) break;
    if (xi > lo) br.push_back(xi);
  }
  br.push_back(hi);
  return br;
}

double piece_integral(const SourceProfile& src, double a, double b, int nodes) {
  // The triweight and the sampled densities are smooth inside the support,
  // so one Gauss-Legendre panel per piece is enough for the analytic form.
  if (src.analytic) {
    std::vector<double> br{a, b};
    return gauss_legendre_composite([&](double s) { return src.density(s); }, br, nodes);
  }
  // Piecewise-linear samples: split at the grid nodes inside the piece.
  std::vector<double> br{a};
  auto i0 = static_cast<std::int64_t>(std::ceil((a - src.start) / src.step));
  for (std::int64_t i = i0;; ++i) {
    double s = src.start + src.step * static_cast<double>(i);
    if (s >= b) break;
    if (s > a) br.push_back(s);
  }
  br.push_back(b);
  return gauss_legendre_composite([&](double s) { return src.density(s); }, br, nodes);
}

}  // namespace

double V_via_integral(double x, const SourceProfile& src, const RationalSpeed& lambda,
                      double delta, int quad_nodes) {
  if (quad_nodes < 1) throw InvalidArgument("V_via_integral: need at least one node");
  if (src.is_zero()) return 0.0;
  auto br = probe_breakpoints(x, lambda.q, src.support_lo, src.support_hi);
  KahanSum coarse, fine;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    double a = br[i], b = br[i + 1];
    if (b <= a) continue;
    double v = v_probe(ProbeContext(x, 0.5 * (a + b), lambda, delta));
    if (v == 0.0) continue;
    coarse.add(v * piece_integral(src, a, b, quad_nodes));
    fine.add(v * piece_integral(src, a, b, 2 * quad_nodes));
  }
  double c = -0.5 * coarse.value(), f = -0.5 * fine.value();
  if (std::fabs(c - f) > 1e-8)
    throw QuadratureFailure("V_via_integral: node doubling changed the result by " +
                            std::to_string(std::fabs(c - f)));
  return f;
}

SecondComponent build_second_component(const SourceProfile& src, const RationalSpeed& lambda,
                                       double x_lo, double x_hi, int per_cell, double delta,
                                       unsigned workers) {
  if (!(x_lo < x_hi)) throw InvalidArgument("second component needs x_lo < x_hi");
  if (per_cell < 1) throw InvalidArgument("per_cell must be positive");
  SecondComponent out;
  out.speed = lambda;
  out.source = src;
  const double step = 1.0 / static_cast<double>(lambda.q * per_cell);
  auto count = static_cast<std::size_t>(std::floor((x_hi - x_lo) / step + 1e-9)) + 1;
  out.profile.start = x_lo;
  out.profile.step = step;
  WindowAverage H = H_from_psi(out.source);
  std::vector<double> tails(count);
  out.profile.values = parallel_map(count, workers, [&](std::size_t i) {
    SumResult r = V_lambda_sum(x_lo + step * static_cast<double>(i), H, lambda, delta);
    tails[i] = r.tail_bound;
    return r.value;
  });
  out.tail_bound = *std::max_element(tails.begin(), tails.end());
  out.profile.validate();
  return out;
}

namespace {

template <class Source>
double residual_on_grid(const SecondComponent& V, Source G) {
  const auto& g = V.profile;
  const std::int64_t per_unit = std::llround(1.0 / g.step);
  const std::int64_t shift = std::llround(V.speed.value() / g.step);
  if (std::fabs(static_cast<double>(per_unit) * g.step - 1.0) > 1e-12 ||
      std::fabs(static_cast<double>(shift) * g.step - V.speed.value()) > 1e-12)
    throw InvalidArgument("grid step must divide both 1 and the speed");
  const auto n = static_cast<std::int64_t>(g.size());
  double worst = 0.0;
  for (std::int64_t i = std::max(per_unit, shift); i + per_unit < n; ++i) {
    double x = g.x_at(static_cast<std::size_t>(i));
    double r = g.values[static_cast<std::size_t>(i - shift)] -
               0.5 * (g.values[static_cast<std::size_t>(i + per_unit)] +
                      g.values[static_cast<std::size_t>(i - per_unit)]) +
               0.5 * (G(x + 1.0) - G(x - 1.0));
    worst = std::max(worst, std::fabs(r));
  }
  return worst;
}

}  // namespace

double dsp2_residual(const ScalarDSP& U, const SecondComponent& V, const RealFn& g) {
  if (!(U.speed == V.speed)) throw InvalidArgument("dsp2_residual: U and V speeds differ");
  return residual_on_grid(V, [&](double s) { return g(U(s)); });
}

double dsp2_residual(const SecondComponent& V) {
  return residual_on_grid(V, [&](double s) { return V.source.cumulative(s); });
}

}  // namespace dsp
