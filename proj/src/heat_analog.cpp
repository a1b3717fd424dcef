#include "dsp/heat_analog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dsp/error.hpp"
#include "dsp/kernels.hpp"

namespace dsp {

void PulseTrainSpec::validate() const {
  if (!(sigma > 0.0)) throw InvalidArgument("pulse speed must be positive");
  if (!(truncation_delta > 0.0 && truncation_delta < 0.5))
    throw InvalidArgument("truncation delta must lie in (0, 1/2)");
}

double phi_profile(double y, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("phi_profile: sigma must be positive");
  if (y <= 0.0) return 1.0 / sigma;
  return std::exp(-sigma * y) / sigma;
}

double phi_deriv(double y, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("phi_deriv: sigma must be positive");
  if (y == 0.0) throw InvalidArgument("phi_deriv: undefined at the kink y = 0");
  if (y < 0.0) return 0.0;
  return -std::exp(-sigma * y);
}

TimeWindow heat_window(double y, double sigma, double delta, double scale) {
  if (!(sigma > 0.0)) throw InvalidArgument("heat sums need sigma > 0");
  WindowSpec spec;
  spec.offset = y;
  spec.rate = sigma;
  spec.halfwidth = 1.0;
  spec.spread = 4.0;
  spec.delta = delta;
  TimeWindow w = summation_window(spec);
  // G(n, .) <= 1 / (2 sqrt(pi n)) < 0.3
  w.tail_bound *= 0.5 / std::sqrt(std::numbers::pi);
  if (scale != 1.0) {
    TimeWindow e = w.enlarged(scale);
    e.tail_bound = window_tail_bound(spec, e.lo, e.hi) * 0.5 / std::sqrt(std::numbers::pi);
    return e;
  }
  return w;
}

double discrete_time_profile(double y, double sigma, double delta, double scale) {
  TimeWindow w = heat_window(y, sigma, delta, scale);
  KahanSum s;
  for (std::int64_t n = w.lo; n <= w.hi; ++n) {
    double t = static_cast<double>(n);
    s.add(heat_kernel(t, y + sigma * t));
  }
  return s.value();
}

namespace {

template <class FloorFn>
double lattice_sum(double y, double sigma, double delta, double scale, FloorFn fl) {
  TimeWindow w = heat_window(y, sigma, delta, scale);
  KahanSum s;
  for (std::int64_t n = w.lo; n <= w.hi; ++n)
    s.add(heat_kernel(static_cast<double>(n), y + static_cast<double>(fl(n))));
  return s.value();
}

template <class FloorFn>
double gap_sum(double y, double sigma, double delta, double scale, FloorFn fl) {
  TimeWindow w = heat_window(y, sigma, delta, scale);
  KahanSum s;
  for (std::int64_t n = w.lo; n <= w.hi; ++n) {
    double t = static_cast<double>(n);
    double snapped = static_cast<double>(fl(n));
    double exact = sigma * t;
    if (snapped == exact) continue;
    s.add(heat_kernel(t, y + snapped) - heat_kernel(t, y + exact));
  }
  return s.value();
}

}  // namespace

double lattice_profile(double y, double sigma, double delta, double scale) {
  return lattice_sum(y, sigma, delta, scale,
                     [sigma](std::int64_t n) { return ifloor(sigma * static_cast<double>(n)); });
}

double lattice_profile(double y, const Rational& sigma, double delta, double scale) {
  return lattice_sum(y, sigma.value(), delta, scale,
                     [&sigma](std::int64_t n) { return sigma.floor_times(n); });
}

double resonance_gap(double y, double sigma, double delta, double scale) {
  return gap_sum(y, sigma, delta, scale,
                 [sigma](std::int64_t n) { return ifloor(sigma * static_cast<double>(n)); });
}

double resonance_gap(double y, const Rational& sigma, double delta, double scale) {
  return gap_sum(y, sigma.value(), delta, scale,
                 [&sigma](std::int64_t n) { return sigma.floor_times(n); });
}

double resonance_gap_integral(double y, double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw InvalidArgument("gap integral needs epsilon > 0");
  const double sigma = 1.0 + epsilon;
  TimeWindow w = heat_window(y, sigma, delta);
  if (w.empty()) return 0.0;
  double a = std::max(1e-12, static_cast<double>(w.lo) - 1.0);
  double b = static_cast<double>(w.hi) + 1.0;
  // ((epsilon t)) jumps at t = m / epsilon; split there.
  std::vector<double> breaks{a};
  for (double m = std::ceil(a * epsilon); m / epsilon < b; m += 1.0)
    if (m / epsilon > a) breaks.push_back(m / epsilon);
  breaks.push_back(b);
  // Split long pieces so each carries only a few Gaussian widths.
  std::vector<double> fine;
  double piece = std::max(1.0, std::sqrt(b) / 4.0);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    int m = std::max(1, static_cast<int>(std::ceil((breaks[i + 1] - breaks[i]) / piece)));
    for (int j = 0; j < m; ++j) fine.push_back(breaks[i] + (breaks[i + 1] - breaks[i]) * j / m);
  }
  fine.push_back(b);
  auto integrand = [&](double t) {
    double f = epsilon * t - std::floor(epsilon * t);
    return -heat_kernel_dx(t, y + sigma * t) * f;
  };
  return gauss_legendre_composite(integrand, fine, 16);
}

double discrete_time_profile_full(double y, double sigma, std::int64_t n_max) {
  KahanSum s;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    double t = static_cast<double>(n);
    s.add(heat_kernel(t, y + sigma * t));
  }
  return s.value();
}

double lattice_profile_full(double y, const Rational& sigma, std::int64_t n_max) {
  KahanSum s;
  for (std::int64_t n = 1; n <= n_max; ++n)
    s.add(heat_kernel(static_cast<double>(n), y + static_cast<double>(sigma.floor_times(n))));
  return s.value();
}

double heat_tv_demo(double epsilon, double delta, double step, unsigned workers) {
  if (!(epsilon > 0.0 && epsilon <= 0.125))
    throw InvalidArgument("heat_tv_demo: epsilon must lie in (0, 1/8]");
  if (!(step > 0.0)) throw InvalidArgument("heat_tv_demo: step must be positive");
  if (step > 1.0 / (8.0 * epsilon))
    throw InvalidArgument("heat_tv_demo: step exceeds 1/(8 epsilon) and cannot resolve one "
                          "oscillation cycle");
  const double y_eps = -1.0 / (epsilon * epsilon);
  std::vector<double> ys = uniform_grid(y_eps, 0.5 * y_eps, step);
  double inv = 1.0 / epsilon;
  bool integral_inverse = std::fabs(inv - std::round(inv)) < 1e-9 * inv;
  std::vector<double> vals;
  if (integral_inverse) {
    auto q = static_cast<std::int64_t>(std::llround(inv));
    Rational sigma(q + 1, q);
    vals = parallel_map(ys.size(), workers,
                        [&](std::size_t i) { return lattice_profile(ys[i], sigma, delta); });
  } else {
    double sigma = 1.0 + epsilon;
    vals = parallel_map(ys.size(), workers,
                        [&](std::size_t i) { return lattice_profile(ys[i], sigma, delta); });
  }
  return total_variation(vals);
}

DecayFitReport profile_decay_fit(double sigma, std::span<const double> ys, double delta,
                                 double floor) {
  DecayFitReport r;
  if (ys.size() < 2) throw InvalidArgument("decay fit needs at least two points");
  std::vector<double> ay;
  r.y_lo = ys[0];
  r.y_hi = ys[0];
  for (double y : ys) {
    if (!(y < 0.0)) throw InvalidArgument("decay fit window must lie in y < 0");
    r.y_lo = std::min(r.y_lo, y);
    r.y_hi = std::max(r.y_hi, y);
    double d = std::fabs(discrete_time_profile(y, sigma, delta) - 1.0 / sigma);
    r.ys.push_back(y);
    r.deviations.push_back(d);
    ay.push_back(-y);
  }
  std::vector<double> clipped;
  for (double d : r.deviations) clipped.push_back(std::max(d, floor));
  r.fitted_exponent = loglog_fit(ay, clipped).slope;
  return r;
}

}  // namespace dsp
