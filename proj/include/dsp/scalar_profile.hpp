#pragma once

// First component of the discrete shock profile: the scalar Lax-Friedrichs
// traveling wave U with U(x - lambda) = (U(x+1) + U(x-1))/2
// - (f(U(x+1)) - f(U(x-1)))/2, plus the compactly supported source psi and
// its window average H that drive the second component.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "dsp/numerics.hpp"

namespace dsp {

using RealFn = std::function<double(double)>;

struct FluxSpec {
  RealFn f;
  RealFn df;
  // Admissible open band for f' along the states.
  double derivative_lower = 0.25;
  double derivative_upper = 1.0;

  void validate() const;
  /// Throws CflViolation unless f' lies strictly inside the band on
  /// `samples` equispaced points of [a, b].
  void check_band(double a, double b, int samples = 1000) const;
};

/// f(u) = u^2 / 2.
FluxSpec burgers_flux();
/// f(u) = a u.
FluxSpec linear_flux(double a);

struct RationalSpeed {
  enum class Role { none, base, perturbed };

  std::int64_t p = 1;
  std::int64_t q = 2;
  Role role = Role::none;

  RationalSpeed() = default;
  /// Throws unless gcd(p, q) = 1 and 1/4 < p/q < 1.
  RationalSpeed(std::int64_t p_, std::int64_t q_, Role r = Role::none);

  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
  Rational rational() const { return Rational(p, q); }
  bool operator==(const RationalSpeed& o) const { return p == o.p && q == o.q; }
};

double rh_speed(const FluxSpec& f, double u_minus, double u_plus);

struct ScalarOptions {
  int window = 400;             // cells in the moving frame
  std::int64_t initial_shift = 0;  // translate the step data by whole cells
  unsigned workers = 1;
  bool pin = true;              // place the midpoint crossing at x = 0
};

/// Sampled profile. Samples live on the lattice x0 + Z/(M q), M the number
/// of sub-cell offsets; off-lattice values use monotone cubic (PCHIP)
/// interpolation and the end states beyond the sampled range.
class ScalarDSP {
 public:
  double u_minus = 0.0;
  double u_plus = 0.0;
  RationalSpeed speed;
  FluxSpec flux;
  std::vector<double> offsets;  // theta_r in [0, 1)
  int lattice_factor = 1;       // M
  std::int64_t key_lo = 0;      // sample i sits at (key_lo + i)/(M q) - pin_shift
  double pin_shift = 0.0;
  std::vector<double> samples;
  // Diagnostics from the iteration.
  std::int64_t steps_used = 0;
  double last_mismatch = 0.0;
  double measured_speed = 0.0;

  double resolution() const { return 1.0 / static_cast<double>(lattice_factor * speed.q); }
  double x_at(std::size_t i) const;
  double x_min() const { return x_at(0); }
  double x_max() const { return x_at(samples.size() - 1); }
  std::size_t size() const { return samples.size(); }
  double operator()(double x) const;
  /// Interpolation rule tag.
  static constexpr const char* interpolation = "pchip";

  void build_interpolant();

 private:
  std::shared_ptr<const std::function<double(double)>> interp_;
};

/// Forward iteration of the scheme from step data with shift-compare
/// convergence. `offsets` sub-cell positions theta_r = r/(offsets q) are
/// realized by an intermediate value in the jump cell.
ScalarDSP compute_scalar_dsp(const FluxSpec& f, double u_minus, double u_plus, int offsets,
                             double tol, std::int64_t max_steps, const ScalarOptions& opt = {});

/// sup over lattice x of the scheme residual (all stencil points are
/// lattice points, so no interpolation is involved).
double dsp1_residual(const ScalarDSP& profile);

/// Compactly supported density on a uniform grid. Between nodes the density
/// is the linear interpolant of the samples unless an analytic form is
/// attached (used by quadrature paths that want a smooth integrand).
struct SourceProfile {
  double start = 0.0;
  double step = 1.0;
  std::vector<double> psi;
  double support_lo = 0.0;
  double support_hi = 0.0;
  double mass = 0.0;
  RealFn analytic;  // optional

  /// Rebuilds prefix sums and mass after the samples change.
  void finalize();
  double sample_density(double s) const;
  double density(double s) const { return analytic ? analytic(s) : sample_density(s); }
  /// Exact integral of the piecewise-linear sample density from -inf to s.
  double cumulative(double s) const;
  bool is_zero() const;
  double sup_abs() const;

 private:
  std::vector<double> prefix_;
};

/// psi = d/ds g(U(s)) by fourth-order central differences.
SourceProfile psi_from_g(const RealFn& g, const ScalarDSP& profile, double grid_step);

/// Triweight bump (35/32w)(1 - r^2)^3, r = (s - center)/w: C^2 with exact
/// support [center - w, center + w]. The grid step is adjusted to divide
/// 2w and the samples are rescaled so their trapezoid mass is `mass`.
SourceProfile psi_bump(double center, double width, double mass, double grid_step);

SourceProfile zero_source(double center = 0.0);

/// H(x) = -1/2 int_{x-1}^{x+1} psi.
class WindowAverage {
 public:
  explicit WindowAverage(SourceProfile src) : src_(std::move(src)) {}
  double operator()(double x) const {
    return -0.5 * (src_.cumulative(x + 1.0) - src_.cumulative(x - 1.0));
  }
  double support_lo() const { return src_.support_lo - 1.0; }
  double support_hi() const { return src_.support_hi + 1.0; }
  double sup_abs() const;
  const SourceProfile& source() const { return src_; }

 private:
  SourceProfile src_;
};

WindowAverage H_from_psi(const SourceProfile& src);

}  // namespace dsp
