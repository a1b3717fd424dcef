#include "dsp/scalar_profile.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dsp/error.hpp"

// Boost 1.74 calls isnan unqualified inside this namespace.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>

namespace dsp {

void FluxSpec::validate() const {
  if (!f || !df) throw InvalidArgument("flux needs both f and f'");
  if (derivative_lower < 0.25 || derivative_upper > 1.0 || !(derivative_lower < derivative_upper))
    throw InvalidArgument("flux derivative band must sit inside [1/4, 1]");
}

void FluxSpec::check_band(double a, double b, int samples) const {
  if (a > b) std::swap(a, b);
  for (int i = 0; i < samples; ++i) {
    double u = samples == 1 ? a : a + (b - a) * i / (samples - 1);
    double d = df(u);
    if (!(d > derivative_lower && d < derivative_upper))
      throw CflViolation("f'(" + std::to_string(u) + ") = " + std::to_string(d) +
                         " leaves the admissible band (" + std::to_string(derivative_lower) +
                         ", " + std::to_string(derivative_upper) + ")");
  }
}

FluxSpec burgers_flux() {
  FluxSpec s;
  s.f = [](double u) { return 0.5 * u * u; };
  s.df = [](double u) { return u; };
  return s;
}

FluxSpec linear_flux(double a) {
  FluxSpec s;
  s.f = [a](double u) { return a * u; };
  s.df = [a](double) { return a; };
  return s;
}

RationalSpeed::RationalSpeed(std::int64_t p_, std::int64_t q_, Role r) : p(p_), q(q_), role(r) {
  if (p <= 0 || q <= 0) throw InvalidArgument("speed p/q needs positive p and q");
  if (std::gcd(p, q) != 1) throw InvalidArgument("speed p/q must be in lowest terms");
  if (!(4 * p > q && p < q)) throw InvalidArgument("speed p/q must lie in (1/4, 1)");
}

double rh_speed(const FluxSpec& f, double u_minus, double u_plus) {
  if (u_minus == u_plus) throw InvalidArgument("rh_speed: states must differ");
  return (f.f(u_plus) - f.f(u_minus)) / (u_plus - u_minus);
}

double ScalarDSP::x_at(std::size_t i) const {
  return static_cast<double>(key_lo + static_cast<std::int64_t>(i)) * resolution() - pin_shift;
}

void ScalarDSP::build_interpolant() {
  std::vector<double> xs(samples.size()), ys(samples);
  for (std::size_t i = 0; i < samples.size(); ++i) xs[i] = x_at(i);
  if (xs.size() < 4) throw InvalidArgument("profile needs at least four samples");
  auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
      std::move(xs), std::move(ys));
  interp_ = std::make_shared<const std::function<double(double)>>(
      [spline](double x) { return (*spline)(x); });
}

double ScalarDSP::operator()(double x) const {
  if (samples.empty()) throw InvalidArgument("empty profile");
  if (x <= x_min()) return samples.front();
  if (x >= x_max()) return samples.back();
  if (!interp_) throw InvalidArgument("profile interpolant not built");
  // Flat stretches return the sample itself; the cubic would add roundoff
  // that finite differences later amplify.
  double pos = (x + pin_shift) / resolution() - static_cast<double>(key_lo);
  auto i = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(samples.size() - 2)));
  if (samples[i] == samples[i + 1]) return samples[i];
  return (*interp_)(x);
}

namespace {

struct RunResult {
  std::map<std::int64_t, double> keyed;
  std::int64_t steps = 0;
  double mismatch = 0.0;
  double drift = 0.0;
};

class Chain {
 public:
  Chain(const FluxSpec& f, double um, double up, int width)
      : f_(f), um_(um), up_(up), u_(width), next_(width), fu_(width) {}

  std::vector<double>& values() { return u_; }
  const std::vector<double>& values() const { return u_; }

  void step() {
    const std::size_t w = u_.size();
    for (std::size_t i = 0; i < w; ++i) fu_[i] = f_.f(u_[i]);
    const double fm = f_.f(um_), fp = f_.f(up_);
    for (std::size_t i = 0; i < w; ++i) {
      double left = i == 0 ? um_ : u_[i - 1];
      double right = i + 1 == w ? up_ : u_[i + 1];
      double fl = i == 0 ? fm : fu_[i - 1];
      double fr = i + 1 == w ? fp : fu_[i + 1];
      next_[i] = 0.5 * (left + right) - 0.5 * (fr - fl);
    }
    u_.swap(next_);
  }

  // Drop `cells` entries on the left, pad with the right state.
  void shift(std::int64_t cells) {
    auto c = static_cast<std::size_t>(cells);
    std::copy(u_.begin() + static_cast<std::ptrdiff_t>(c), u_.end(), u_.begin());
    std::fill(u_.end() - static_cast<std::ptrdiff_t>(c), u_.end(), up_);
  }

 private:
  const FluxSpec& f_;
  double um_, up_;
  std::vector<double> u_, next_, fu_;
};

// Position of the midpoint crossing on the cells of one parity, by linear
// interpolation in the physical index.
double crossing(const std::vector<double>& u, std::int64_t j_of_0, int parity, double mid) {
  for (std::size_t i = 0; i + 2 < u.size(); ++i) {
    std::int64_t j = j_of_0 + static_cast<std::int64_t>(i);
    if (((j % 2) + 2) % 2 != parity) continue;
    double a = u[i], b = u[i + 2];
    if ((a - mid) * (b - mid) <= 0.0 && a != b)
      return static_cast<double>(j) + 2.0 * (a - mid) / (a - b);
  }
  throw NonConvergence("midpoint crossing not found in the frame", 0.0);
}

RunResult run_offset(const FluxSpec& f, double um, double up, const RationalSpeed& lam, int r,
                     int M, double tol, std::int64_t max_steps, const ScalarOptions& opt,
                     bool measure_drift) {
  const std::int64_t p = lam.p, q = lam.q;
  const int W = std::max(400, opt.window + (opt.window % 2));
  if (2 * p >= W / 4) throw InvalidArgument("frame too narrow for this speed");
  const double theta = static_cast<double>(r) / static_cast<double>(M * q);
  const double alpha = up + (um - up) * 0.5 * theta;
  const std::int64_t s0 = opt.initial_shift;

  Chain chain(f, um, up, W);
  std::int64_t origin = -W / 2;  // physical index of array slot 0
  {
    auto& u = chain.values();
    for (int i = 0; i < W; ++i) {
      std::int64_t j = origin + i;
      u[i] = j < s0 ? um : (j == s0 ? alpha : up);
    }
  }
  RunResult res;
  std::vector<double> saved = chain.values();
  const double jump = std::fabs(um - up);
  int growing = 0;
  int last_width = -1;
  std::int64_t n = 0;
  bool converged = false;
  while (!converged) {
    for (std::int64_t t = 0; t < 2 * q; ++t) chain.step();
    n += 2 * q;
    chain.shift(2 * p);
    origin += 2 * p;
    const auto& u = chain.values();
    double mism = 0.0;
    int width = 0;
    for (int i = 0; i < W; ++i) {
      mism = std::max(mism, std::fabs(u[i] - saved[i]));
      if (std::min(std::fabs(u[i] - um), std::fabs(u[i] - up)) > 1e-3 * jump) ++width;
    }
    res.mismatch = mism;
    growing = width > last_width ? growing + 1 : 0;
    last_width = width;
    if (width > W / 3 || (growing > 40 && width > W / 8))
      throw EntropyViolation("profile keeps spreading (transition width " +
                             std::to_string(width) + " cells): rarefaction orientation");
    if (mism <= tol && n >= 8 * q) converged = true;
    saved = u;
    if (!converged && n >= max_steps)
      throw NonConvergence("shift-compare iteration exceeded " + std::to_string(max_steps) +
                               " steps (last mismatch " + std::to_string(mism) + ")",
                           mism);
  }
  {
    const auto& u = chain.values();
    if (std::fabs(u.front() - um) > 1e-8 || std::fabs(u.back() - up) > 1e-8)
      throw NonConvergence("profile does not reach the end states inside the frame", res.mismatch);
    auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    f.check_band(*lo, *hi, 200);
  }
  const int parity = static_cast<int>(((n + s0) % 2 + 2) % 2);
  if (measure_drift) {
    const double mid = 0.5 * (um + up);
    double c1 = crossing(chain.values(), origin, parity, mid);
    const std::int64_t span = 50 * q;
    for (std::int64_t t = 0; t < span; ++t) {
      chain.step();
      if ((t + 1) % (2 * q) == 0) {
        chain.shift(2 * p);
        origin += 2 * p;
      }
    }
    n += span;
    if (span % (2 * q) != 0) throw InvalidArgument("drift span must be a multiple of 2q");
    double c2 = crossing(chain.values(), origin, parity, mid);
    res.drift = (c2 - c1) / static_cast<double>(span);
  }
  // Record the chain through 2q levels: level n samples x = j - p n / q on
  // cells with n + j + s0 even, which together cover theta + Z/q.
  for (std::int64_t t = 0; t < 2 * q; ++t) {
    const auto& u = chain.values();
    const std::int64_t nn = n + t;
    for (int i = 4; i < W - 4; ++i) {
      std::int64_t j = origin + i;
      if (((nn + j + s0) % 2 + 2) % 2 != 0) continue;
      std::int64_t key = M * (q * j - p * nn) - r;
      res.keyed[key] = u[i];
    }
    if (t + 1 < 2 * q) chain.step();
  }
  res.steps = n;
  return res;
}

}  // namespace

ScalarDSP compute_scalar_dsp(const FluxSpec& f, double u_minus, double u_plus, int offsets,
                             double tol, std::int64_t max_steps, const ScalarOptions& opt) {
  f.validate();
  if (offsets < 1) throw InvalidArgument("need at least one offset");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (max_steps < 1) throw InvalidArgument("max_steps must be positive");
  ScalarDSP out;
  out.u_minus = u_minus;
  out.u_plus = u_plus;
  out.flux = f;
  out.lattice_factor = offsets;
  f.check_band(u_minus, u_plus);

  double lam = u_minus == u_plus ? f.df(u_minus) : rh_speed(f, u_minus, u_plus);
  Rational rat;
  if (!rational_approx(lam, 1e-12, 100000, rat))
    throw InvalidArgument("speed " + std::to_string(lam) + " is not a rational p/q");
  out.speed = RationalSpeed(rat.num, rat.den);
  const std::int64_t q = out.speed.q;
  for (int r = 0; r < offsets; ++r)
    out.offsets.push_back(static_cast<double>(r) / static_cast<double>(offsets * q));

  if (u_minus == u_plus) {
    const std::int64_t half = 200 * offsets * q;
    out.key_lo = -half;
    out.samples.assign(static_cast<std::size_t>(2 * half + 1), u_minus);
    out.measured_speed = out.speed.value();
    out.build_interpolant();
    return out;
  }

  std::vector<RunResult> runs(static_cast<std::size_t>(offsets));
  std::vector<std::exception_ptr> errors(runs.size());
  parallel_map(runs.size(), opt.workers, [&](std::size_t r) {
    try {
      runs[r] = run_offset(f, u_minus, u_plus, out.speed, static_cast<int>(r), offsets, tol,
                           max_steps, opt, r == 0);
    } catch (...) {
      errors[r] = std::current_exception();
    }
    return 0.0;
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::map<std::int64_t, double> merged;
  for (const auto& run : runs) {
    merged.insert(run.keyed.begin(), run.keyed.end());
    out.steps_used = std::max(out.steps_used, run.steps);
    out.last_mismatch = std::max(out.last_mismatch, run.mismatch);
  }
  out.measured_speed = runs[0].drift;
  // Longest stretch of consecutive keys.
  std::int64_t best_lo = 0, best_len = 0, cur_lo = 0, cur_len = 0, prev = 0;
  bool first = true;
  for (const auto& [key, val] : merged) {
    if (!first && key == prev + 1) {
      ++cur_len;
    } else {
      cur_lo = key;
      cur_len = 1;
    }
    if (cur_len > best_len) {
      best_len = cur_len;
      best_lo = cur_lo;
    }
    prev = key;
    first = false;
  }
  out.key_lo = best_lo;
  out.samples.reserve(static_cast<std::size_t>(best_len));
  for (std::int64_t k = best_lo; k < best_lo + best_len; ++k) out.samples.push_back(merged.at(k));

  if (opt.pin) {
    out.pin_shift = 0.0;
    out.build_interpolant();
    const double mid = 0.5 * (u_minus + u_plus);
    std::size_t i = 0;
    while (i + 1 < out.samples.size() && !((out.samples[i] - mid) * (out.samples[i + 1] - mid) <= 0.0))
      ++i;
    if (i + 1 >= out.samples.size()) throw NonConvergence("no midpoint crossing", out.last_mismatch);
    double a = out.x_at(i), b = out.x_at(i + 1);
    double fa = out(a) - mid;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::fabs(a)); ++it) {
      double c = 0.5 * (a + b);
      double fc = out(c) - mid;
      if ((fa <= 0.0) == (fc <= 0.0)) {
        a = c;
        fa = fc;
      } else {
        b = c;
      }
    }
    out.pin_shift = 0.5 * (a + b);
  }
  out.build_interpolant();
  return out;
}

double dsp1_residual(const ScalarDSP& prof) {
  const std::int64_t MQ = static_cast<std::int64_t>(prof.lattice_factor) * prof.speed.q;
  const std::int64_t PM = static_cast<std::int64_t>(prof.lattice_factor) * prof.speed.p;
  const auto& u = prof.samples;
  const auto n = static_cast<std::int64_t>(u.size());
  const auto& f = prof.flux.f;
  double worst = 0.0;
  for (std::int64_t i = std::max(MQ, PM); i + MQ < n; ++i) {
    double up1 = u[static_cast<std::size_t>(i + MQ)];
    double um1 = u[static_cast<std::size_t>(i - MQ)];
    double r = u[static_cast<std::size_t>(i - PM)] - 0.5 * (up1 + um1) + 0.5 * (f(up1) - f(um1));
    worst = std::max(worst, std::fabs(r));
  }
  return worst;
}

void SourceProfile::finalize() {
  prefix_.assign(psi.size(), 0.0);
  KahanSum s;
  for (std::size_t i = 1; i < psi.size(); ++i) {
    s.add(0.5 * step * (psi[i - 1] + psi[i]));
    prefix_[i] = s.value();
  }
  mass = psi.empty() ? 0.0 : prefix_.back();
  if (psi.empty()) {
    support_lo = support_hi = start;
  } else {
    support_lo = start;
    support_hi = start + step * static_cast<double>(psi.size() - 1);
  }
}

double SourceProfile::sample_density(double s) const {
  if (psi.size() < 2 || s <= support_lo || s >= support_hi) return 0.0;
  double pos = (s - start) / step;
  auto i = static_cast<std::size_t>(std::min<double>(std::floor(pos), static_cast<double>(psi.size() - 2)));
  double t = pos - static_cast<double>(i);
  return psi[i] + (psi[i + 1] - psi[i]) * t;
}

double SourceProfile::cumulative(double s) const {
  if (psi.size() < 2 || s <= support_lo) return 0.0;
  if (s >= support_hi) return mass;
  double pos = (s - start) / step;
  auto i = static_cast<std::size_t>(std::min<double>(std::floor(pos), static_cast<double>(psi.size() - 2)));
  double t = pos - static_cast<double>(i);
  return prefix_[i] + step * (psi[i] * t + 0.5 * (psi[i + 1] - psi[i]) * t * t);
}

bool SourceProfile::is_zero() const {
  return std::all_of(psi.begin(), psi.end(), [](double v) { return v == 0.0; });
}

double SourceProfile::sup_abs() const {
  double m = 0.0;
  for (double v : psi) m = std::max(m, std::fabs(v));
  return m;
}

SourceProfile zero_source(double center) {
  SourceProfile s;
  s.start = center - 0.5;
  s.step = 0.5;
  s.psi = {0.0, 0.0, 0.0};
  s.finalize();
  return s;
}

SourceProfile psi_from_g(const RealFn& g, const ScalarDSP& profile, double grid_step) {
  if (!(grid_step > 0.0)) throw InvalidArgument("psi_from_g: grid step must be positive");
  const double h = grid_step;
  const double a = profile.x_min() + 2.0 * h;
  const double b = profile.x_max() - 2.0 * h;
  const auto count = static_cast<std::size_t>(std::floor((b - a) / h)) + 1;
  std::vector<double> vals(count);
  auto F = [&](double s) { return g(profile(s)); };
  for (std::size_t i = 0; i < count; ++i) {
    double s = a + h * static_cast<double>(i);
    vals[i] = (-F(s + 2 * h) + 8 * F(s + h) - 8 * F(s - h) + F(s - 2 * h)) / (12.0 * h);
  }
  std::size_t first = count, last = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (std::fabs(vals[i]) > 1e-14) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == count) return zero_source(0.0);
  if (first == 0 || last + 1 == count)
    throw InvalidArgument("psi_from_g: psi does not vanish at the window edges");
  SourceProfile src;
  src.step = h;
  src.start = a + h * static_cast<double>(first - 1);
  src.psi.assign(vals.begin() + static_cast<std::ptrdiff_t>(first - 1),
                 vals.begin() + static_cast<std::ptrdiff_t>(last + 2));
  src.psi.front() = 0.0;
  src.psi.back() = 0.0;
  src.finalize();
  return src;
}

SourceProfile psi_bump(double center, double width, double mass, double grid_step) {
  if (!(width > 0.0)) throw InvalidArgument("psi_bump: width must be positive");
  if (!(grid_step > 0.0)) throw InvalidArgument("psi_bump: grid step must be positive");
  auto cells = static_cast<std::size_t>(std::max(2.0, std::ceil(2.0 * width / grid_step)));
  SourceProfile src;
  src.step = 2.0 * width / static_cast<double>(cells);
  src.start = center - width;
  const double norm = 35.0 / (32.0 * width);
  auto shape = [center, width, norm](double s) {
    double r = (s - center) / width;
    if (std::fabs(r) >= 1.0) return 0.0;
    double w = 1.0 - r * r;
    return norm * w * w * w;
  };
  src.psi.resize(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i)
    src.psi[i] = mass * shape(src.start + src.step * static_cast<double>(i));
  src.psi.front() = 0.0;
  src.psi.back() = 0.0;
  src.finalize();
  if (mass != 0.0 && src.mass != 0.0) {
    double scale = mass / src.mass;
    for (double& v : src.psi) v *= scale;
    src.finalize();
  }
  src.analytic = [shape, mass](double s) { return mass * shape(s); };
  return src;
}

double WindowAverage::sup_abs() const {
  KahanSum s;
  for (double v : src_.psi) s.add(std::fabs(v) * src_.step);
  return 0.5 * s.value();
}

WindowAverage H_from_psi(const SourceProfile& src) { return WindowAverage(src); }

}  // namespace dsp
