#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "dsp/numerics.hpp"

using namespace dsp;

TEST_CASE("kahan sum recovers small terms lost by naive summation") {
  KahanSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  CHECK(s.value() == doctest::Approx(1.0 + 1e-13).epsilon(1e-15));
}

TEST_CASE("floor_div rounds toward minus infinity") {
  CHECK(floor_div(7, 2) == 3);
  CHECK(floor_div(-7, 2) == -4);
  CHECK(floor_div(-8, 2) == -4);
  CHECK(floor_div(7, -2) == -4);
}

TEST_CASE("rational arithmetic and exact floors") {
  Rational a(6, -4);
  CHECK(a.num == -3);
  CHECK(a.den == 2);
  CHECK((Rational(1, 2) + Rational(1, 3)) == Rational(5, 6));
  CHECK((Rational(1, 2) - Rational(3, 7)) == Rational(1, 14));
  Rational s(11, 10);
  for (std::int64_t n = 1; n < 200; ++n) CHECK(s.floor_times(n) == (11 * n) / 10);
  Rational out;
  CHECK(rational_approx(0.5, 1e-12, 1000, out));
  CHECK(out == Rational(1, 2));
  CHECK(rational_approx(4.0 / 9.0, 1e-12, 1000, out));
  CHECK(out == Rational(4, 9));
  CHECK_FALSE(rational_approx(std::numbers::pi, 1e-12, 1000, out));
}

TEST_CASE("uniform grid keeps both endpoints") {
  auto g = uniform_grid(0.0, 1.0, 0.3);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  CHECK(g.size() == 5);
  CHECK_THROWS(uniform_grid(1.0, 0.0, 0.1));
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  for (int n : {1, 2, 5, 16, 64}) {
    const auto& r = gauss_legendre(n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], 2 * n - 2);
    CHECK(s == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
  }
  std::vector<double> br{0.0, 0.5, 1.0, 3.0};
  double v = gauss_legendre_composite([](double x) { return std::exp(x); }, br, 20);
  CHECK(v == doctest::Approx(std::exp(3.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("simpson and adaptive simpson") {
  CHECK(simpson([](double x) { return x * x * x; }, 0.0, 2.0, 2) == doctest::Approx(4.0));
  double v = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12);
  CHECK(v == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("log-log fit recovers a power law") {
  std::vector<double> x{1, 10, 100, 1000}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
  auto fit = loglog_fit(x, y);
  CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("parallel map is independent of worker count") {
  auto fn = [](std::size_t i) { return std::sin(static_cast<double>(i)); };
  auto a = parallel_map(1000, 1, fn);
  auto b = parallel_map(1000, 4, fn);
  CHECK(a == b);
  CHECK_THROWS(parallel_map(10, 3, [](std::size_t i) -> double {
    if (i == 7) throw std::runtime_error("boom");
    return 0.0;
  }));
}

TEST_CASE("total variation of a monotone sequence") {
  std::vector<double> v{0.0, 0.25, 0.5, 1.0};
  CHECK(total_variation(v) == 1.0);
}
