#include "dsp/kernels.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "dsp/error.hpp"
#include "dsp/numerics.hpp"

namespace dsp {

namespace {

constexpr std::int64_t kExactLimit = 60;

// log(n!) - log(sqrt(2 pi n) (n/e)^n) for integer n.
double stirlerr(double n) {
  constexpr double S0 = 1.0 / 12.0;
  constexpr double S1 = 1.0 / 360.0;
  constexpr double S2 = 1.0 / 1260.0;
  constexpr double S3 = 1.0 / 1680.0;
  constexpr double S4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    long double nl = n;
    long double v = std::lgammal(nl + 1.0L) - (nl + 0.5L) * std::log(nl) + nl -
                    0.918938533204672741780329736406L;
    return static_cast<double>(v);
  }
  const double nn = n * n;
  if (n > 500) return (S0 - S1 / nn) / n;
  if (n > 80) return (S0 - (S1 - S2 / nn) / nn) / n;
  if (n > 35) return (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n;
  return (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x log(x/np) + np - x, accurate when x is close to np.
double bd0(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

double exact_kernel(std::int64_t n, std::int64_t j) {
  if (j > n - j) j = n - j;
  std::uint64_t c = 1;
  for (std::int64_t i = 1; i <= j; ++i) c = c * static_cast<std::uint64_t>(n - j + i) / static_cast<std::uint64_t>(i);
  return std::ldexp(static_cast<double>(c), static_cast<int>(-n));
}

double saddle_point_kernel(std::int64_t n, std::int64_t j) {
  if (j == 0 || j == n) return std::ldexp(1.0, static_cast<int>(-n));
  const double dn = static_cast<double>(n);
  const double x = static_cast<double>(j);
  const double half = 0.5 * dn;
  double lc = stirlerr(dn) - stirlerr(x) - stirlerr(dn - x) - bd0(x, half) - bd0(dn - x, half);
  double lf = 2.0 * 0.918938533204672741780329736406 + std::log(x) + std::log1p(-x / dn);
  return std::exp(lc - 0.5 * lf);
}

}  // namespace

double binom_kernel(std::int64_t n, std::int64_t k) {
  if (n < 0) return 0.0;
  if (k < -n || k > n) return 0.0;
  if (((n + k) & 1) != 0) return 0.0;
  // C(n, j) = C(n, n - j); evaluate one representative so symmetry is exact.
  const std::int64_t j = (n - (k < 0 ? -k : k)) / 2;
  if (n <= kExactLimit) return exact_kernel(n, j);
  return saddle_point_kernel(n, j);
}

std::vector<KernelEntry> kernel_row(std::int64_t n) {
  std::vector<KernelEntry> row;
  if (n < 0) return row;
  row.reserve(static_cast<std::size_t>(n + 1));
  for (std::int64_t k = -n; k <= n; k += 2) row.push_back({k, binom_kernel(n, k)});
  return row;
}

double kernel_row_sum(std::int64_t n) {
  KahanSum s;
  for (std::int64_t k = -n; k <= n; k += 2) s.add(binom_kernel(n, k));
  return s.value();
}

KernelSample kernel_sample(std::int64_t n, std::int64_t k) {
  KernelSample s;
  s.index = {n, k};
  s.value = binom_kernel(n, k);
  s.clt_value = n >= 1 ? 2.0 * heat_kernel(0.5 * static_cast<double>(n), static_cast<double>(k)) : 0.0;
  s.abs_error = std::fabs(s.value - s.clt_value);
  return s;
}

double heat_kernel(double t, double x) {
  if (!(t > 0.0)) throw InvalidArgument("heat kernel needs t > 0");
  return std::exp(-x * x / (4.0 * t)) / (2.0 * std::sqrt(std::numbers::pi * t));
}

double heat_kernel_deriv(double t, double x, int m, Axis axis) {
  if (!(t > 0.0)) throw InvalidArgument("heat kernel derivative needs t > 0");
  if (m < 0) throw InvalidArgument("derivative order must be >= 0");
  const int order = axis == Axis::space ? m : 2 * m;
  const double s = 2.0 * std::sqrt(t);
  const double u = x / s;
  // Physicists' Hermite polynomial H_order(u).
  double h0 = 1.0, h1 = 2.0 * u;
  double h = order == 0 ? h0 : h1;
  for (int j = 1; j < order; ++j) {
    h = 2.0 * u * h1 - 2.0 * j * h0;
    h0 = h1;
    h1 = h;
  }
  const double sign = (order % 2) ? -1.0 : 1.0;
  return sign * h * std::pow(s, -order) * heat_kernel(t, x);
}

double frac(double a) {
  double f = a - std::floor(a);
  return f >= 1.0 ? 0.0 : f;
}

std::int64_t ifloor(double a) { return static_cast<std::int64_t>(std::floor(a)); }

namespace {

double bernoulli(int m, double x) {
  switch (m) {
    case 1: return x - 0.5;
    case 2: return (x - 1.0) * x + 1.0 / 6.0;
    case 3: return ((x - 1.5) * x + 0.5) * x;
    case 4: return (((x - 2.0) * x + 1.0) * x) * x - 1.0 / 30.0;
    case 5: return ((((x - 2.5) * x + 5.0 / 3.0) * x) * x - 1.0 / 6.0) * x;
    case 6: return ((((x - 3.0) * x + 2.5) * x * x - 0.5) * x) * x + 1.0 / 42.0;
    default: throw InvalidArgument("sawtooth order must be in [1, 6]");
  }
}

constexpr std::array<double, 7> kFactorial{1, 1, 2, 6, 24, 120, 720};

}  // namespace

double sawtooth(int m, double t) {
  if (m < 1 || m > kMaxSawtoothOrder) throw InvalidArgument("sawtooth order must be in [1, 6]");
  return -bernoulli(m, frac(t)) / kFactorial[m];
}

SawtoothFamily make_sawtooth_family(int m) {
  if (m < 1 || m > kMaxSawtoothOrder) throw InvalidArgument("sawtooth order must be in [1, 6]");
  SawtoothFamily fam;
  fam.order = m;
  for (int j = 1; j <= m; ++j) {
    // Smallest zero of B_j on [0, 1].
    auto b = [j](double x) { return bernoulli(j, x); };
    double anchor = 0.0;
    if (std::fabs(b(0.0)) < 1e-15) {
      anchor = 0.0;
    } else {
      constexpr int scan = 4096;
      double lo = 0.0;
      for (int i = 1; i <= scan; ++i) {
        double hi = static_cast<double>(i) / scan;
        if ((b(lo) < 0) != (b(hi) < 0)) {
          double a = lo, c = hi;
          for (int it = 0; it < 200 && c - a > 1e-16; ++it) {
            double mid = 0.5 * (a + c);
            if ((b(a) < 0) != (b(mid) < 0)) c = mid; else a = mid;
          }
          anchor = 0.5 * (a + c);
          break;
        }
        lo = hi;
      }
    }
    fam.anchors.push_back(anchor);
  }
  return fam;
}

}  // namespace dsp
