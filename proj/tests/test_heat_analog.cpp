#include <cmath>

#include "doctest.h"
#include "dsp/heat_analog.hpp"
#include "dsp/kernels.hpp"

using namespace dsp;

TEST_CASE("closed-form line-source profile") {
  CHECK(phi_profile(-1, 2) == 0.5);
  CHECK(phi_profile(1, 1) == std::exp(-1.0));
  CHECK(phi_profile(0, 3) == doctest::Approx(1.0 / 3.0));
  CHECK(phi_deriv(1, 1) == -std::exp(-1.0));
  CHECK(phi_deriv(-5, 1) == 0.0);
  CHECK(phi_deriv(2, 0.5) == doctest::Approx(-std::exp(-1.0)));
  CHECK_THROWS(phi_deriv(0.0, 1.0));
  CHECK_THROWS(phi_profile(1.0, 0.0));
  // phi solves -phi'' - sigma phi' = 0 away from the kink with a unit jump in phi'
  double s = 1.7, h = 1e-4;
  double y = 0.8;
  double d2 = (phi_profile(y + h, s) - 2 * phi_profile(y, s) + phi_profile(y - h, s)) / (h * h);
  CHECK(std::fabs(d2 + s * phi_deriv(y, s)) < 1e-6);
}

TEST_CASE("pulse train spec validation") {
  PulseTrainSpec p;
  p.sigma = -1.0;
  CHECK_THROWS(p.validate());
  p.sigma = 1.0;
  p.truncation_delta = 0.6;
  CHECK_THROWS(p.validate());
}

TEST_CASE("discrete-time profile against full sums") {
  CHECK(discrete_time_profile(50.0, 1.0) < 1e-10);
  double full = discrete_time_profile_full(-400.0, 1.0, 1600);
  CHECK(discrete_time_profile(-400.0, 1.0) == doctest::Approx(full).epsilon(1e-12));
  CHECK(std::fabs(discrete_time_profile(-400.0, 1.0) - 1.0) < 1e-2);
  for (double sigma : {1.0, 1.3, 0.7}) {
    for (double y : {-60.0, -200.0, -800.0, 5.0}) {
      auto n_max = static_cast<std::int64_t>(8 * std::fabs(y) / sigma + 400);
      CHECK(discrete_time_profile(y, sigma) ==
            doctest::Approx(discrete_time_profile_full(y, sigma, n_max)).epsilon(1e-12).scale(1e-15));
    }
  }
}

TEST_CASE("lattice profile and the resonance gap") {
  Rational s(11, 10);
  CHECK(lattice_profile(50.0, s) < 1e-10);
  CHECK(lattice_profile(-200.0, s) ==
        doctest::Approx(lattice_profile_full(-200.0, s, 4000)).epsilon(1e-8));
  // integer speeds collapse exactly
  for (double y : {-100.5, -37.0, -1600.0}) {
    CHECK(std::fabs(lattice_profile(y, Rational(2, 1)) - discrete_time_profile(y, 2.0)) <= 1e-14);
    CHECK(resonance_gap(y, Rational(2, 1)) == 0.0);
  }
  double fused = resonance_gap(-50.0, s);
  double split = lattice_profile(-50.0, s) - discrete_time_profile(-50.0, 1.1);
  CHECK(fused == doctest::Approx(split).scale(1e-10));
  // double speeds agree with exact rational floors away from ties
  CHECK(lattice_profile(-123.4, 1.3) == doctest::Approx(lattice_profile(-123.4, Rational(13, 10))).epsilon(1e-12));
}

TEST_CASE("truncation soundness under window enlargement") {
  for (double y : {-50.0, -300.0, -1000.0}) {
    for (double sigma : {1.0, 1.1}) {
      CHECK(std::fabs(discrete_time_profile(y, sigma, 0.1, 1.5) - discrete_time_profile(y, sigma)) < 1e-10);
      CHECK(std::fabs(lattice_profile(y, sigma, 0.1, 1.5) - lattice_profile(y, sigma)) < 1e-10);
    }
    auto w = heat_window(y, 1.1, 0.1);
    CHECK(w.tail_bound < 1e-15);
  }
}

TEST_CASE("gap integral approximation is finite and small") {
  double g = resonance_gap_integral(-100.0, 0.1);
  CHECK(std::isfinite(g));
  CHECK(std::fabs(g) < 0.1);
}

TEST_CASE("heat TV demo preconditions") {
  CHECK_THROWS(heat_tv_demo(0.2, 0.1, 0.1));
  CHECK_THROWS(heat_tv_demo(0.1, 0.1, 2.0));
  double tv = heat_tv_demo(0.1, 0.1, 0.5);
  CHECK(tv > 0.0);
  double fine = heat_tv_demo(0.1, 0.1, 0.25);
  CHECK(fine >= tv * (1 - 1e-9));
}

TEST_CASE("downstream decay fit") {
  std::vector<double> ys{-100, -200, -400, -800, -1600};
  auto r = profile_decay_fit(1.0, ys);
  CHECK(r.fitted_exponent <= 1e-9);
  CHECK(r.y_hi < 0.0);
  for (double d : r.deviations) CHECK(d < 1e-10);
}
