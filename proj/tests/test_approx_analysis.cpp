#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "doctest.h"
#include "dsp/approx_analysis.hpp"
#include "dsp/error.hpp"
#include "dsp/kernels.hpp"

using namespace dsp;

namespace {

const RationalSpeed half(1, 2);

RationalSpeed tilde(int k) { return RationalSpeed(k, 2 * k + 1, RationalSpeed::Role::perturbed); }

// Plain trapezoid of |d^m G(t, y + lambda t)| over [a, b] on a fine grid.
double heat_tail_trapezoid(double y, double lambda, int order, double a, double b, int cells) {
  double h = (b - a) / cells, s = 0.0;
  for (int i = 0; i <= cells; ++i) {
    double t = a + h * i;
    if (t <= 0.0) continue;
    double x = y + lambda * t;
    double v = order == 0 ? heat_kernel(t, x) : std::fabs(heat_kernel_deriv(t, x, order, Axis::space));
    s += (i == 0 || i == cells ? 0.5 : 1.0) * v;
  }
  return s * h;
}

}  // namespace

TEST_CASE("resonance parameters") {
  for (int k : {2, 4, 6, 8, 10}) {
    auto P = ResonanceParams::make(k);
    CHECK(P.epsilon == Rational(-1, 4 * k + 2));
    CHECK(P.beta == doctest::Approx(2.0 * 0.5 / (k / (2.0 * k + 1))).epsilon(1e-15));
    CHECK(P.gamma == doctest::Approx(2.0 / std::pow(k / (2.0 * k + 1), 1.5)).epsilon(1e-15));
    CHECK(P.A(1.0) == doctest::Approx(1.0 / k).epsilon(1e-14));
  }
  CHECK_THROWS_AS(ResonanceParams::make(3), InvalidArgument);
  CHECK_THROWS_AS(ResonanceParams::make(0), InvalidArgument);
}

TEST_CASE("error budget") {
  auto b = error_budget(400.0, -0.1, 2, 0.1, 1.0, 1.0);
  CHECK(b.E_term == doctest::Approx(2.0 / std::pow(400.0, 0.9) + 0.4 / std::pow(400.0, 0.4)));
  CHECK_THROWS(error_budget(400.0, -0.1, 2, 0.1, -1.0, 1.0));
}

TEST_CASE("local CLT error scan") {
  std::vector<std::int64_t> ns{100, 1000, 10000, 100000};
  auto scan = clt_error_scan(ns, 0.1, 2);
  REQUIRE(scan.rows.size() == 4);
  CHECK(scan.rows[0].max_error < 0.01);
  CHECK(scan.slope <= -1.3);
  // direct oracle for n = 100 from the exact binomial probability
  double worst = 0.0;
  for (int k = -100; k <= 100; k += 2) {
    if (std::abs(k) > std::pow(100.0, 0.6)) continue;
    double exact = std::exp(std::lgamma(101.0) - std::lgamma(51.0 + k / 2) - std::lgamma(51.0 - k / 2) -
                            100.0 * std::numbers::ln2);
    worst = std::max(worst, std::fabs(exact - std::sqrt(2.0 / (std::numbers::pi * 100.0)) *
                                                  std::exp(-k * k / 200.0)));
  }
  CHECK(scan.rows[0].max_error == doctest::Approx(worst).epsilon(1e-9));
  std::vector<std::int64_t> unsorted{1000, 100};
  CHECK_THROWS(clt_error_scan(unsorted, 0.1));
}

TEST_CASE("discrete tail mass") {
  double t100 = tail_mass_discrete(-100.0, 1.0, 0.25);
  double t400 = tail_mass_discrete(-400.0, 1.0, 0.25);
  CHECK(t400 < t100);
  // oracle: direct sum far past the cut, no remainder
  RealInterval iv = asymptotic_interval(100.0, 1.0, 0.25);
  KahanSum s;
  for (std::int64_t n = 1; n <= 5000; ++n) {
    if (n >= iv.lo && n <= iv.hi) continue;
    s.add(binom_kernel(n, ifloor(-100.0 + static_cast<double>(n))));
  }
  CHECK(t100 >= s.value());
  CHECK(t100 - s.value() < 1e-30 + 1e-12);
  CHECK(t100 == doctest::Approx(6.834e-3).epsilon(1e-3));
  // below |y|/2 the kernel vanishes identically at unit speed
  for (std::int64_t n = 1; n < 50; ++n) CHECK(binom_kernel(n, ifloor(-100.0 + static_cast<double>(n))) == 0.0);
  double slow = tail_mass_discrete(-200.0, 0.5, 0.25);
  CHECK(slow >= 0.0);
  CHECK(slow < 1.0);
  CHECK_THROWS(tail_mass_discrete(1.0, 1.0, 0.25));
}

TEST_CASE("heat tail mass") {
  double t0 = tail_mass_heat(-100.0, 1.0, 0.25, 0);
  double t1 = tail_mass_heat(-100.0, 1.0, 0.25, 1);
  CHECK(t1 < t0);
  CHECK(tail_mass_heat(-400.0, 1.0, 0.25, 0) < t0);
  RealInterval iv = asymptotic_interval(100.0, 1.0, 0.25);
  for (int order : {0, 1, 2}) {
    double oracle = heat_tail_trapezoid(-100.0, 1.0, order, 0.0, iv.lo, 200000) +
                    heat_tail_trapezoid(-100.0, 1.0, order, iv.hi, 4000.0, 400000);
    CHECK(tail_mass_heat(-100.0, 1.0, 0.25, order) == doctest::Approx(oracle).epsilon(1e-6));
  }
  CHECK(tail_mass_heat_outside(-100.0, 1.0, 0, 0.0, std::numeric_limits<double>::infinity()) == 0.0);
  CHECK_THROWS(tail_mass_heat(-100.0, 1.0, 0.25, -1));
}

TEST_CASE("fractional identity") {
  auto [a, b] = frac_identity_check(0.3, 1, 2);
  CHECK(a == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(b == doctest::Approx(1.1).epsilon(1e-14));
  auto [c, d] = frac_identity_check(-1.7, 0, 1);
  CHECK(c == doctest::Approx(frac(-1.7)));
  CHECK(d == doctest::Approx(frac(-1.7)));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> zd(-100.0, 100.0);
  std::uniform_int_distribution<int> qd(1, 50), pd(-200, 200);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    int q = qd(rng), p = pd(rng);
    while (std::gcd(p, q) != 1) p = pd(rng);
    auto [l, r] = frac_identity_check(zd(rng), p, q);
    worst = std::max(worst, std::fabs(l - r));
  }
  CHECK(worst < 1e-12);
  CHECK_THROWS(frac_identity_check(0.1, 2, 4));
}

TEST_CASE("heat surrogate of the probe kernel") {
  CHECK(w_probe(ProbeContext(300.0, 0.0, half)) < 1e-10);
  ProbeContext far(-500.0, 0.0, half);
  CHECK(std::fabs(w_probe(far) - 4.0) <= std::pow(500.0, -0.85));
  ProbeContext c(-200.0, 0.3, half);
  CHECK(w_probe(c) == doctest::Approx(w_probe_full(c, 20000)).epsilon(1e-10));
  ProbeContext near(-12.0, 0.3, tilde(2));
  CHECK(std::fabs(w_probe(near) - w_probe_full(near, 2000)) < 1e-10);
}

TEST_CASE("parity sums and the decomposition") {
  CHECK_THROWS_AS(parity_sum(ProbeContext(-100.0, 0.0, RationalSpeed(1, 3))), InvalidArgument);
  CHECK_THROWS_AS(parity_sum(ProbeContext(-100.0, 0.0, tilde(3))), InvalidArgument);
  CHECK(parity_sum(ProbeContext(400.0, 0.0, half)) == 0.0);

  for (RationalSpeed s : {half, tilde(2), tilde(4), tilde(8)}) {
    for (double x : {-15.0, -60.0, -200.0}) {
      ProbeContext c(x, 0.41, s);
      double full = v_probe_full(c, 4000) - w_probe_full(c, 4000) - 2.0 * parity_sum_full(c, 4000);
      CHECK(std::fabs(decomposition_residual(c) - full) < 1e-10);
      CHECK(std::fabs(v_minus_w(c) - (v_probe_full(c, 4000) - w_probe_full(c, 4000))) < 1e-10);
      ProbeContext wide = c;
      wide.window_scale = 1.5;
      CHECK(std::fabs(parity_sum(wide) - parity_sum(c)) < 1e-9);
      CHECK(std::fabs(w_probe(wide) - w_probe(c)) < 1e-9);
    }
  }

  // the common bound holds on every family with one constant
  for (RationalSpeed s : {half, tilde(2), tilde(4), tilde(8)}) {
    for (double x : {-10.0, -20.0, -40.0, -80.0, -500.0}) {
      for (int i = 0; i < 10; ++i) {
        ProbeContext c(x, i / 10.0, s);
        CHECK(std::fabs(parity_sum(c)) <= 0.2 * std::pow(-x, -0.9));
      }
    }
  }
  CHECK(std::fabs(v_minus_w(ProbeContext(400.0, 0.0, half))) < 1e-10);
}

TEST_CASE("closed-form difference of the heat surrogates") {
  auto P = ResonanceParams::make(2);
  double frozen = w_diff_closed_form(-300.0, 0.0, P, 3.0, true);
  CHECK(frozen == doctest::Approx(4.0 - 5.0).epsilon(1e-12));
  for (double xi : {0.0, 0.13, 0.6}) {
    double a = w_diff_closed_form(-300.0, xi, P);
    double b = w_diff_closed_form(-300.0, xi + 1.0, P);
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
    double direct = w_probe(ProbeContext(-300.0, xi, half)) - w_probe(ProbeContext(-300.0, xi, P.lambda_tilde));
    auto E = error_budget(300.0, P.eps(), 2, 0.1, 1.0, 1.0);
    CHECK(std::fabs(a - direct) <= E.total());
  }
  CHECK_THROWS(w_diff_closed_form(10.0, 0.0, P));
}

TEST_CASE("sum against integral for the perturbed speed") {
  for (int k : {2, 4}) {
    auto P = ResonanceParams::make(k);
    for (double z : {-250.0, -500.0, -1000.0}) {
      auto [l, r] = technical_lhs_rhs(z, P);
      auto E = error_budget(-z, P.eps(), 2, 0.1, 1.0, 1.0);
      CHECK(std::fabs(l - r) <= E.total());
    }
  }
  // closer in the lattice sum and the integral are both visible and still agree to the budget
  auto P = ResonanceParams::make(2);
  auto [l, r] = technical_lhs_rhs(-20.0, P);
  CHECK(std::fabs(l - r) <= error_budget(20.0, P.eps(), 2, 0.1, 1.0, 1.0).total());
}
