#pragma once

// Shared numerical plumbing: compensated sums, rationals, quadrature rules,
// fits and a deterministic parallel map.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dsp/error.hpp"

namespace dsp {

/// Neumaier variant of Kahan summation. Order of add() calls fixes the
/// result bit for bit.
class KahanSum {
 public:
  KahanSum() = default;
  explicit KahanSum(double init) : sum_(init) {}

  void add(double v) {
    double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  KahanSum& operator+=(double v) {
    add(v);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);

/// Floor division for signed integers (rounds toward -infinity).
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  std::int64_t r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

/// Reduced fraction with positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  Rational(std::int64_t n, std::int64_t d);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  /// floor(value * n) in exact integer arithmetic.
  std::int64_t floor_times(std::int64_t n) const { return floor_div(num * n, den); }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

/// Best rational approximation with denominator <= max_den (continued
/// fractions). Returns nullopt-like sentinel via the flag when |value - p/q|
/// exceeds tol.
bool rational_approx(double value, double tol, std::int64_t max_den, Rational& out);

/// Uniform grid a, a+h, ..., with the last point clamped to b.
std::vector<double> uniform_grid(double a, double b, double step);

/// Sum of |f(x_{i+1}) - f(x_i)| over sampled values.
double total_variation(std::span<const double> values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line through (log x, log y). Requires positive data.
LineFit loglog_fit(std::span<const double> x, std::span<const double> y);

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

/// Composite Gauss-Legendre with `nodes` points on each of the pieces
/// delimited by the sorted breakpoints.
double gauss_legendre_composite(const std::function<double(double)>& f,
                                std::span<const double> breakpoints, int nodes);

/// Composite Simpson on [a, b] with an even number of panels.
double simpson(const std::function<double(double)>& f, double a, double b, int panels);

/// Adaptive Simpson on [a, b]; throws QuadratureFailure if the depth budget
/// is exhausted before the local error estimate drops below tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 40);

/// Worker count from an explicit value, then DSP_RESONANCE_WORKERS, then 1.
unsigned resolve_workers(unsigned requested);

/// Evaluates fn(i) for i in [0, count) on `workers` threads. Results are
/// written by index, so the output does not depend on scheduling.
std::vector<double> parallel_map(std::size_t count, unsigned workers,
                                 const std::function<double(std::size_t)>& fn);

}  // namespace dsp
