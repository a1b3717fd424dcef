#pragma once

// The main experiment: V at speed 1/2 minus V at speed k/(2k+1), sampled on
// the downstream window J(eps), with the oscillation points of the
// alternation argument and the total variation of the difference.

#include <cstdint>
#include <string>
#include <vector>

#include "dsp/approx_analysis.hpp"
#include "dsp/dsp_construct.hpp"
#include "dsp/scalar_profile.hpp"

namespace dsp {

struct SpeedFamily {
  std::vector<int> k_list{2, 4, 6, 8, 10};

  void validate() const;
  std::vector<ResonanceParams> params(double delta) const;
};

struct OscillationGrid {
  std::vector<double> y_points;
  std::vector<bool> odd;            // parity label of the index n (1-based)
  std::vector<Rational> beta_y;     // beta y_n, exact
  double J_lo = 0.0;                // J(eps) in y = -x
  double J_hi = 0.0;
  double spacing = 0.0;             // floor(|eps|^{-1/(1+2 delta)}) / beta
};

/// Largest admissible point count, floor(|eps|^{-1/(1+2 delta)}).
std::int64_t max_oscillation_points(const ResonanceParams& params);
/// y_1 = floor(|eps|^{-2/(1+2d)}) / beta and, for n >= 2,
/// y_n = y_1 + (n floor(|eps|^{-1/(1+2d)}) + (n+1)/2) / beta.
OscillationGrid oscillation_points(const ResonanceParams& params, std::int64_t count);

/// Per-point cutoff of the alternation argument: 1/(gamma |eps| y^{d+1/2})
/// at odd points and half of that at even ones.
double lemma_cutoff(double y, bool odd, const ResonanceParams& params);

/// int_{|tau| < cutoff y^d} tau e^{-tau^2/2} ((beta y + gamma eps sqrt(y) tau)) dtau.
/// `freeze` drops the tau term inside the fractional part.
double H0_eval(double y, const ResonanceParams& params, double cutoff, bool freeze = false);

/// V(x) at speed 1/2 minus V(x) at speed k/(2k+1).
double delta_V(double x, const SourceProfile& src, const ResonanceParams& params, int quad_nodes = 8);

/// A + (1/4) sqrt(2/(pi lambda~ y)) int_{|tau| < cutoff y^d} tau e^{-tau^2/2} h(tau) dtau with
/// h = int psi(xi) ((2 xi + beta y + gamma eps sqrt(y) tau)) dxi.
double delta_V_surrogate(double y, const SourceProfile& src, const ResonanceParams& params,
                         double cutoff = 3.0);

/// int psi(xi) ((2 xi + a)) dxi, exact for the piecewise-linear samples.
double source_frac_average(const SourceProfile& src, double a);

double tv_on_grid(const RealFn& fn, double a, double b, double step);

struct AlternationRow {
  std::int64_t n = 0;
  double y = 0.0;
  bool odd = true;
  double cutoff = 0.0;
  double H0 = 0.0;
};

struct StudyOptions {
  double delta = 0.1;
  std::int64_t alternation_count = 10;  // clipped to the admissible count
  double step_divisor = 20.0;
  double max_step = 1.0;
  double step_override = 0.0;  // > 0 replaces the derived step
  int quad_nodes = 8;
  unsigned workers = 1;
  bool keep_samples = true;
};

struct VariationReport {
  int k = 0;
  Rational epsilon;
  double y_lo = 0.0;
  double y_hi = 0.0;
  double sample_step = 0.0;
  double tv_value = 0.0;
  double A_term = 0.0;
  std::vector<AlternationRow> alternation;
  std::vector<double> xs;
  std::vector<double> dV;
  double runtime_seconds = 0.0;
  bool ok = true;
  std::string error;
};

struct TvSamples {
  double tv = 0.0;
  double step = 0.0;
  std::vector<double> xs;
  std::vector<double> values;
};
/// delta_V sampled at x = -y over y in [y_lo, y_hi], TV of the samples.
TvSamples delta_V_tv(const SourceProfile& src, const ResonanceParams& params, double y_lo, double y_hi,
                     double step, int quad_nodes = 8, unsigned workers = 1);

/// Step tied to the oscillation spacing, min(max_step, spacing / divisor).
double study_step(const ResonanceParams& params, const StudyOptions& opt);

VariationReport run_study_one(int k, const SourceProfile& src, const StudyOptions& opt);
/// Runs every k in order; a failure for one k is recorded in its report.
std::vector<VariationReport> run_study(const SpeedFamily& family, const SourceProfile& src,
                                       const StudyOptions& opt);

/// sup over grid points x in [x_lo, x_hi] of |V(x + dx) - V(x)| |x|^{1-d}.
double translation_check(const SecondComponent& V, double dx, double x_lo, double x_hi = -100.0,
                         double delta = 0.1);

}  // namespace dsp
