// Study-level properties of the profile difference: alternation, uniform
// TV across k, localization, grid convergence and source-width robustness.

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "dsp/variation_experiment.hpp"

using namespace dsp;

namespace {

const std::vector<int> ks{2, 4, 6, 8, 10};

double study_tv(int k, double width, double step_factor = 1.0) {
  StudyOptions opt;
  opt.keep_samples = false;
  opt.alternation_count = 1;
  auto P = ResonanceParams::make(k);
  opt.step_override = study_step(P, StudyOptions{}) * step_factor;
  auto r = run_study_one(k, psi_bump(0.0, width, 1.0, width / 2000), opt);
  REQUIRE(r.ok);
  return r.tv_value;
}

}  // namespace

TEST_CASE("alternation pattern at the oscillation points") {
  for (int k : {2, 4}) {
    CAPTURE(k);
    auto P = ResonanceParams::make(k);
    auto g = oscillation_points(P, std::min<std::int64_t>(10, max_oscillation_points(P)));
    for (std::size_t i = 0; i < g.y_points.size(); ++i) {
      double y = g.y_points[i];
      double h = H0_eval(y, P, lemma_cutoff(y, g.odd[i], P));
      CAPTURE(y);
      if (g.odd[i]) CHECK(h <= -0.5);
      else CHECK(std::fabs(h) <= 0.2);
    }
  }
}

TEST_CASE("total variation does not vanish across k") {
  std::vector<double> tv;
  for (int k : ks) tv.push_back(study_tv(k, 0.125));
  double lo = *std::min_element(tv.begin(), tv.end());
  CAPTURE(tv);
  CHECK(lo >= 0.25 * tv[0]);
  CHECK(*std::max_element(tv.begin(), tv.end()) <= 4.0 * lo);
}

TEST_CASE("variation is localized near the resonance window") {
  auto P = ResonanceParams::make(2);
  auto src = psi_bump(0.0, 0.125, 1.0, 0.125 / 2000);
  double Y = std::pow(10.0, 2.0 / 1.2);
  double step = study_step(P, StudyOptions{});
  double near = delta_V_tv(src, P, 0.5 * Y, Y, step).tv;
  double far = delta_V_tv(src, P, 10.0 * Y, 11.0 * Y, step).tv;
  CHECK(far <= 0.2 * near);
}

TEST_CASE("grid convergence of the sampled variation") {
  double a = study_tv(2, 0.125), b = study_tv(2, 0.125, 0.5);
  CHECK(std::fabs(b - a) <= 0.1 * a);
}

TEST_CASE("halving the source width") {
  for (int k : ks) {
    CAPTURE(k);
    double a = study_tv(k, 0.125), b = study_tv(k, 0.0625);
    CAPTURE(a);
    CAPTURE(b);
    CHECK(std::fabs(b - a) <= 0.25 * a);
  }
}
