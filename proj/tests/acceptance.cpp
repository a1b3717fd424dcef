// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria (0 when all pass).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsp/approx_analysis.hpp"
#include "dsp/heat_analog.hpp"
#include "dsp/kernels.hpp"
#include "dsp/numerics.hpp"
#include "dsp/scalar_profile.hpp"
#include "dsp/variation_experiment.hpp"

#ifndef DSP_LAB_CLI
#define DSP_LAB_CLI "dsp_lab"
#endif

using namespace dsp;
namespace fs = std::filesystem;

namespace {

// Values below this are indistinguishable from roundoff in the sums.
constexpr double kFloor = 1e-13;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

unsigned workers() { return resolve_workers(0); }

Outcome crit_kernel() {
  std::vector<double> err = parallel_map(10001, workers(), [](std::size_t n) {
    return std::fabs(kernel_row_sum(static_cast<std::int64_t>(n)) - 1.0);
  });
  double worst = *std::max_element(err.begin(), err.end());
  bool zeros = true;
  for (std::int64_t n : {0, 1, 7, 60, 61, 1000, 9999, 10000})
    for (std::int64_t k = -n - 3; k <= n + 3; ++k)
      if (((n + k) & 1) != 0 || std::abs(k) > n) zeros = zeros && binom_kernel(n, k) == 0.0;
  return {worst <= 1e-12 && zeros,
          "max |row sum - 1| = " + sci(worst) + " over n <= 10^4, parity zeros " + (zeros ? "exact" : "NOT exact")};
}

Outcome crit_clt() {
  std::vector<std::int64_t> ns{100, 1000, 10000, 100000};
  auto scan = clt_error_scan(ns, 0.1, workers());
  return {scan.slope <= -1.3, "fitted slope " + sci(scan.slope) + " (threshold -1.3)"};
}

Outcome crit_heat_closed_forms() {
  double a = phi_profile(-1.0, 2.0);
  double b = phi_deriv(1.0, 1.0);
  bool exact = a == 0.5 && std::fabs(b + std::exp(-1.0)) <= 1e-16;
  std::vector<double> ys{-100, -200, -400, -800, -1600};
  std::string detail = "phi(-1,2) = " + sci(a) + ", phi'(1,1) + 1/e = " + sci(b + std::exp(-1.0));
  bool decay = true;
  for (double sigma : {1.0, 1.5, 2.0}) {
    auto fit = profile_decay_fit(sigma, ys, 0.1, kFloor);
    double mx = *std::max_element(fit.deviations.begin(), fit.deviations.end());
    bool ok = fit.fitted_exponent <= -1.0 || mx <= kFloor;
    decay = decay && ok;
    detail += "; sigma=" + sci(sigma) + ": max |Phi-1/sigma| " + sci(mx) +
              (mx <= kFloor ? " (at roundoff floor)" : ", exponent " + sci(fit.fitted_exponent));
  }
  return {exact && decay, detail};
}

Outcome crit_heat_uniformity() {
  std::vector<double> tv;
  for (double e : {0.1, 0.05, 0.025}) tv.push_back(heat_tv_demo(e, 0.1, 0.5, workers()));
  double lo = *std::min_element(tv.begin(), tv.end()), hi = *std::max_element(tv.begin(), tv.end());
  bool pass = lo > 0.0 && hi / lo <= 2.0 && lo >= 0.5 * tv[0];
  return {pass, "TV at eps 1/10, 1/20, 1/40 = " + sci(tv[0]) + ", " + sci(tv[1]) + ", " + sci(tv[2]) +
                    "; max/min " + sci(hi / lo)};
}

Outcome crit_scalar() {
  ScalarOptions opt;
  opt.workers = workers();
  ScalarDSP U = compute_scalar_dsp(burgers_flux(), 0.7, 0.3, 4, 1e-12, 2000000, opt);
  bool mono = true;
  for (std::size_t i = 0; i + 1 < U.size(); ++i) mono = mono && U.samples[i + 1] <= U.samples[i] + 1e-14;
  double res = dsp1_residual(U);
  double drift = std::fabs(U.measured_speed - 0.5);
  bool speed = U.speed.p == 1 && U.speed.q == 2;
  return {mono && speed && res < 1e-8 && drift < 1e-6,
          std::string("speed ") + std::to_string(U.speed.p) + "/" + std::to_string(U.speed.q) +
              (mono ? ", monotone" : ", NOT monotone") + ", dsp1 residual " + sci(res) + ", |drift - 1/2| " + sci(drift)};
}

Outcome crit_representations() {
  SourceProfile src = psi_bump(0.0, 0.125, 1.0, 0.125 / 2000);
  RationalSpeed half(1, 2);
  WindowAverage H = H_from_psi(src);
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> ud(-2000.0, 50.0);
  std::vector<double> xs(100);
  for (auto& x : xs) x = ud(rng);
  std::vector<double> d = parallel_map(xs.size(), workers(), [&](std::size_t i) {
    return std::fabs(V_lambda(xs[i], H, half) - V_via_integral(xs[i], src, half));
  });
  double worst = *std::max_element(d.begin(), d.end());
  auto V = build_second_component(src, half, -200.0, 20.0, 2, 0.1, workers());
  double res = dsp2_residual(V);
  return {worst < 1e-6 && res < 1e-6,
          "max |V_lambda - V_via_integral| " + sci(worst) + " at 100 x in [-2000, 50]; dsp2 residual " + sci(res)};
}

Outcome crit_frac_identity() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> zd(-100.0, 100.0);
  std::uniform_int_distribution<std::int64_t> qd(1, 50), pd(-200, 200);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    std::int64_t q = qd(rng), p = pd(rng);
    while (std::gcd(p, q) != 1) p = pd(rng);
    auto [l, r] = frac_identity_check(zd(rng), p, q);
    worst = std::max(worst, std::fabs(l - r));
  }
  return {worst <= 1e-12, "max |lhs - rhs| " + sci(worst) + " over 10^4 samples"};
}

Outcome crit_parity() {
  const std::vector<double> probe{-250.0, -500.0, -1000.0, -2000.0};
  std::vector<RationalSpeed> speeds{RationalSpeed(1, 2)};
  for (int k : {2, 4, 8}) speeds.emplace_back(k, 2 * k + 1, RationalSpeed::Role::perturbed);
  std::vector<double> C;
  std::vector<double> resid(probe.size(), 0.0);
  double raw_max = 0.0;
  for (const auto& s : speeds) {
    double c = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i)
      for (int j = 0; j < 10; ++j) {
        ProbeContext ctx(probe[i], j / 10.0, s);
        double v = std::fabs(parity_sum(ctx));
        raw_max = std::max(raw_max, v);
        c = std::max(c, std::max(v, kFloor) * std::pow(-probe[i], 0.9));
        if (s.q == 2) resid[i] = std::max(resid[i], std::fabs(decomposition_residual(ctx)));
      }
    C.push_back(c);
  }
  double ratio = *std::max_element(C.begin(), C.end()) / *std::min_element(C.begin(), C.end());
  std::vector<double> ax, ry;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    ax.push_back(-probe[i]);
    ry.push_back(std::max(resid[i], kFloor));
  }
  double slope = loglog_fit(ax, ry).slope;
  double rmax = *std::max_element(resid.begin(), resid.end());
  bool decay = slope <= -0.75 || rmax <= kFloor;
  std::string detail = "constants ratio " + sci(ratio) + " (raw max |sum| " + sci(raw_max) +
                       (raw_max <= kFloor ? ", at roundoff floor" : "") + "); residual " +
                       (rmax <= kFloor ? "at roundoff floor (max " + sci(rmax) + ")" : "exponent " + sci(slope));
  return {ratio <= 3.0 && decay, detail};
}

Outcome crit_alternation() {
  auto P = ResonanceParams::make(2);
  std::int64_t count = std::min<std::int64_t>(10, max_oscillation_points(P));
  auto g = oscillation_points(P, count);
  bool pass = true;
  double worst_odd = -1e300, worst_even = 0.0;
  for (std::size_t i = 0; i < g.y_points.size(); ++i) {
    double y = g.y_points[i];
    double h = H0_eval(y, P, lemma_cutoff(y, g.odd[i], P));
    if (g.odd[i]) {
      worst_odd = std::max(worst_odd, h);
      pass = pass && h <= -0.5;
    } else {
      worst_even = std::max(worst_even, std::fabs(h));
      pass = pass && std::fabs(h) <= 0.2;
    }
  }
  return {pass, std::to_string(count) + " points; max H0 at odd points " + sci(worst_odd) +
                    " (need <= -0.5), max |H0| at even points " + sci(worst_even) + " (need <= 0.2)"};
}

Outcome crit_theorem() {
  SourceProfile src = psi_bump(0.0, 0.125, 1.0, 0.125 / 2000);
  StudyOptions opt;
  opt.workers = workers();
  opt.keep_samples = false;
  auto reports = run_study(SpeedFamily{{2, 4, 6, 8, 10}}, src, opt);
  std::vector<double> tv;
  std::string detail = "TV";
  bool all_ok = true;
  for (const auto& r : reports) {
    all_ok = all_ok && r.ok;
    tv.push_back(r.tv_value);
    detail += " k=" + std::to_string(r.k) + ":" + (r.ok ? sci(r.tv_value) : "FAILED");
  }
  double lo = *std::min_element(tv.begin(), tv.end()), hi = *std::max_element(tv.begin(), tv.end());
  auto P = ResonanceParams::make(2);
  double Y = reports[0].y_hi;
  auto far = delta_V_tv(src, P, 10.0 * Y, 11.0 * Y, reports[0].sample_step, opt.quad_nodes, opt.workers);
  double contrast = tv[0] > 0.0 ? far.tv / tv[0] : 1.0;
  bool uniform = lo > 0.0 && lo >= 0.25 * tv[0] && hi / lo <= 4.0;
  detail += "; min/k2 " + sci(lo / tv[0]) + ", max/min " + sci(lo > 0.0 ? hi / lo : INFINITY) +
            "; far-window contrast " + sci(contrast) + (contrast <= 0.2 ? " (ok)" : " (too large)");
  return {all_ok && uniform && contrast <= 0.2, detail};
}

Outcome crit_translation() {
  SourceProfile src = psi_bump(0.0, 0.125, 1.0, 0.125 / 2000);
  auto V = build_second_component(src, RationalSpeed(1, 2), -2001.0, -98.0, 2, 0.1, workers());
  // sup of |V(x+1) - V(x)| |x|^{0.9}, each difference floored at roundoff
  auto scaled_sup = [&](double a, double b, double& raw) {
    double s = 0.0;
    raw = 0.0;
    for (std::size_t i = 0; i < V.profile.size(); ++i) {
      double x = V.profile.x_at(i);
      if (x < a || x > b) continue;
      double d = std::fabs(V(x + 1.0) - V.profile.values[i]);
      raw = std::max(raw, d);
      s = std::max(s, std::max(d, kFloor) * std::pow(-x, 0.9));
    }
    return s;
  };
  double raw_near = 0.0, raw_far = 0.0;
  double near = scaled_sup(-1000.0, -100.0, raw_near);
  double far = scaled_sup(-2000.0, -1000.0, raw_far);
  double whole = translation_check(V, 1.0, -2000.0, -100.0);
  bool pass = std::isfinite(whole) && far <= 2.0 * near;
  return {pass, "sup |dV| |x|^0.9: [-1000,-100] " + sci(near) + ", [-2000,-1000] " + sci(far) +
                    "; raw max |V(x+1)-V(x)| " + sci(std::max(raw_near, raw_far)) +
                    (std::max(raw_near, raw_far) <= kFloor ? " (at roundoff floor)" : "")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome crit_determinism() {
  fs::path base = fs::temp_directory_path() / ("dsp_lab_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  fs::create_directories(base);
  {
    std::ofstream cfg(base / "config.json");
    cfg << R"({"kernel": {"n_max": 200, "n_list": [100, 1000]},
               "analysis": {"x_list": [-20, -250], "xi_samples": 3, "frac_samples": 500},
               "variation": {"k_list": [2, 4]}})";
  }
  bool same = true;
  std::string detail;
  int files = 0;
  for (const char* sub : {"kernel", "analysis", "variation"}) {
    fs::path a = base / (std::string(sub) + "_a"), b = base / (std::string(sub) + "_b");
    std::string cmd = std::string("\"") + DSP_LAB_CLI + "\" " + sub + " --config \"" + (base / "config.json").string() +
                      "\" --out \"";
    int ra = std::system((cmd + a.string() + "\" --workers 1 > /dev/null 2>&1").c_str());
    int rb = std::system((cmd + b.string() + "\" --workers 2 > /dev/null 2>&1").c_str());
    if (ra != rb) {
      same = false;
      detail += std::string(sub) + ": exit codes differ; ";
    }
    if (!fs::exists(a / "manifest.json")) {
      same = false;
      detail += std::string(sub) + ": no manifest; ";
      continue;
    }
    auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
    std::vector<std::string> names{"manifest.json"};
    for (const auto& f : manifest["files"]) names.push_back(f["path"].get<std::string>());
    for (const auto& n : names) {
      ++files;
      if (!fs::exists(b / n) || slurp(a / n) != slurp(b / n)) {
        same = false;
        detail += std::string(sub) + "/" + n + " differs; ";
      }
    }
  }
  fs::remove_all(base);
  if (same) detail = std::to_string(files) + " files byte-identical across two runs (1 and 2 workers)";
  return {same, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "kernel exactness", 10.0, crit_kernel},
      {2, "local CLT slope", 60.0, crit_clt},
      {3, "heat analog closed forms and decay", 0.0, crit_heat_closed_forms},
      {4, "heat resonance uniformity", 300.0, crit_heat_uniformity},
      {5, "scalar discrete shock profile", 60.0, crit_scalar},
      {6, "representation equivalence", 300.0, crit_representations},
      {7, "fractional identity", 5.0, crit_frac_identity},
      {8, "parity-sum k-independence", 0.0, crit_parity},
      {9, "alternation at oscillation points", 0.0, crit_alternation},
      {10, "TV uniformity of the profile difference", 1800.0, crit_theorem},
      {11, "translation bound", 0.0, crit_translation},
      {12, "determinism", 0.0, crit_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = c.budget_s <= 0.0 || secs < c.budget_s;
    if (!in_time) o.detail += "; over the " + sci(c.budget_s) + " s budget";
    bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s criterion %2d (%s): %s [%.2f s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
