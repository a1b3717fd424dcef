#include "dsp/numerics.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

namespace dsp {

double compensated_sum(std::span<const double> values) {
  KahanSum s;
  for (double v : values) s.add(v);
  return s.value();
}

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw InvalidArgument("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  num = n / g;
  den = d / g;
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
}
Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
}
Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.num * b.num, a.den * b.den);
}
Rational operator/(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den, a.den * b.num);
}

bool rational_approx(double value, double tol, std::int64_t max_den, Rational& out) {
  // Convergents h/k of the continued fraction of value.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double x = value;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(x);
    auto ai = static_cast<std::int64_t>(a);
    std::int64_t h2 = ai * h1 + h0;
    std::int64_t k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::fabs(value - static_cast<double>(h1) / static_cast<double>(k1)) <= tol) {
      out = Rational(h1, k1);
      return true;
    }
    double frac = x - a;
    if (frac < 1e-300) break;
    x = 1.0 / frac;
  }
  if (k1 != 0 && std::fabs(value - static_cast<double>(h1) / static_cast<double>(k1)) <= tol) {
    out = Rational(h1, k1);
    return true;
  }
  return false;
}

std::vector<double> uniform_grid(double a, double b, double step) {
  if (!(step > 0.0)) throw InvalidArgument("grid step must be positive");
  if (!(a < b)) throw InvalidArgument("grid interval must satisfy a < b");
  std::vector<double> xs;
  auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
  xs.reserve(n + 2);
  for (std::size_t i = 0; i <= n; ++i) xs.push_back(a + static_cast<double>(i) * step);
  if (b - xs.back() > 1e-9 * step) xs.push_back(b);
  return xs;
}

double total_variation(std::span<const double> values) {
  KahanSum s;
  for (std::size_t i = 1; i < values.size(); ++i) s.add(std::fabs(values[i] - values[i - 1]));
  return s.value();
}

LineFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_fit needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("loglog_fit needs positive data");
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

namespace {

GaussRule build_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 512) throw InvalidArgument("Gauss-Legendre order must be in [1, 512]");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

double gauss_legendre_composite(const std::function<double(double)>& f,
                                std::span<const double> breakpoints, int nodes) {
  const GaussRule& rule = gauss_legendre(nodes);
  KahanSum total;
  for (std::size_t p = 1; p < breakpoints.size(); ++p) {
    double a = breakpoints[p - 1], b = breakpoints[p];
    if (!(b > a)) continue;
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    KahanSum piece;
    for (int i = 0; i < nodes; ++i) piece.add(rule.weights[i] * f(mid + half * rule.nodes[i]));
    total.add(half * piece.value());
  }
  return total.value();
}

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels < 2) panels = 2;
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  KahanSum s;
  s.add(f(a));
  s.add(f(b));
  for (int i = 1; i < panels; ++i) s.add((i % 2 ? 4.0 : 2.0) * f(a + i * h));
  return s.value() * h / 3.0;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double fa, double b,
                    double fb, double m, double fm, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double diff = left + right - whole;
  if (std::fabs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  if (depth <= 0) throw QuadratureFailure("adaptive Simpson exceeded its depth budget");
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (!(b > a)) return 0.0;
  double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DSP_RESONANCE_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

std::vector<double> parallel_map(std::size_t count, unsigned workers,
                                 const std::function<double(std::size_t)>& fn) {
  std::vector<double> out(count);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) out[i] = fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace dsp
