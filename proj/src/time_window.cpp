#include "dsp/time_window.hpp"

#include <algorithm>
#include <cmath>

#include "dsp/error.hpp"
#include "dsp/numerics.hpp"

namespace dsp {

TimeWindow TimeWindow::enlarged(double factor) const {
  if (empty()) return *this;
  double center = 0.5 * static_cast<double>(lo + hi);
  double half = 0.5 * static_cast<double>(hi - lo) * factor;
  TimeWindow w = *this;
  w.lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(center - half)));
  w.hi = static_cast<std::int64_t>(std::ceil(center + half));
  return w;
}

RealInterval asymptotic_interval(double y, double lambda, double delta) {
  if (!(lambda > 0.0)) throw InvalidArgument("interval needs lambda > 0");
  if (!(delta > 0.0 && delta < 0.5)) throw InvalidArgument("interval needs delta in (0, 1/2)");
  double half = std::pow(std::fabs(y), 0.5 + delta);
  return {y / lambda - half, y / lambda + half};
}

namespace {

double log_bound(const WindowSpec& s, double n) {
  double dev = std::fabs(s.offset + s.rate * n) - s.halfwidth;
  if (dev <= 0.0) return 0.0;
  return -dev * dev / (s.spread * n);
}

}  // namespace

double window_tail_bound(const WindowSpec& s, std::int64_t lo, std::int64_t hi) {
  KahanSum tail;
  const std::int64_t lower_end = std::min<std::int64_t>(lo - 1, 50'000'000);
  for (std::int64_t n = 1; n <= lower_end; ++n) tail.add(std::exp(log_bound(s, static_cast<double>(n))));
  // Upper side: the decay rate of the bound increases with n, so once it is
  // below the tolerance a geometric remainder with the current ratio bounds
  // the rest.
  std::int64_t n = std::max<std::int64_t>(hi + 1, 1);
  for (std::int64_t count = 0; count < 10'000'000; ++count, ++n) {
    double lb = log_bound(s, static_cast<double>(n));
    double term = std::exp(lb);
    tail.add(term);
    if (lb < -80.0) {
      double next = log_bound(s, static_cast<double>(n + 1));
      double ratio = std::exp(next - lb);
      if (ratio < 1.0) {
        tail.add(term * ratio / (1.0 - ratio));
        break;
      }
    }
  }
  return tail.value();
}

TimeWindow summation_window(const WindowSpec& s) {
  if (!(s.rate > 0.0)) throw InvalidArgument("window needs a positive rate");
  // |offset + rate n| <= halfwidth + a sqrt(n), a = sqrt(spread log_tol),
  // solved as quadratics in sqrt(n).
  const double a = std::sqrt(s.spread * s.log_tol);
  const double r = s.rate;
  auto roots = [&](double c) -> std::pair<double, double> {
    // r u^2 - a u + c = 0
    double disc = a * a - 4.0 * r * c;
    if (disc < 0.0) return {1.0, 0.0};
    double sq = std::sqrt(disc);
    return {(a - sq) / (2.0 * r), (a + sq) / (2.0 * r)};
  };
  auto [u1, u2] = roots(s.offset - s.halfwidth);
  TimeWindow w;
  if (u2 < u1 || u2 <= 0.0) {
    w.lo = 1;
    w.hi = 0;
  } else {
    double ulo = std::max(0.0, u1);
    // offset + r u^2 >= -(halfwidth + a u)
    double c2 = s.offset + s.halfwidth;
    double disc = a * a - 4.0 * r * c2;
    if (disc > 0.0) {
      double root = (-a + std::sqrt(disc)) / (2.0 * r);
      ulo = std::max(ulo, root);
    }
    w.lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(ulo * ulo)) - 2);
    w.hi = static_cast<std::int64_t>(std::ceil(u2 * u2)) + 2;
  }
  if (s.offset < 0.0) {
    RealInterval iv = asymptotic_interval(-s.offset, s.rate, s.delta);
    auto plo = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(iv.lo)));
    auto phi = static_cast<std::int64_t>(std::floor(iv.hi));
    if (phi >= plo) {
      if (w.empty()) {
        w.lo = plo;
        w.hi = phi;
      } else {
        w.lo = std::min(w.lo, plo);
        w.hi = std::max(w.hi, phi);
      }
    }
  }
  w.tail_bound = window_tail_bound(s, w.lo, w.hi);
  return w;
}

}  // namespace dsp
