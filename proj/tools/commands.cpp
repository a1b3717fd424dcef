#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "dsp/approx_analysis.hpp"
#include "dsp/error.hpp"
#include "dsp/heat_analog.hpp"
#include "dsp/kernels.hpp"
#include "dsp/scalar_profile.hpp"
#include "dsp/variation_experiment.hpp"

namespace dsp::cli {

using nlohmann::json;
using Rows = std::vector<std::vector<Cell>>;

bool RunContext::task(const std::string& name, const std::function<std::string()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  json rec{{"name", name}};
  try {
    std::string verdict = fn();
    rec["status"] = verdict.empty() ? "ok" : "failed";
    if (!verdict.empty()) rec["message"] = verdict;
  } catch (const std::exception& e) {
    rec["status"] = "failed";
    rec["message"] = e.what();
  }
  timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = rec["status"] == "ok";
  tasks.push_back(std::move(rec));
  return ok;
}

bool RunContext::all_ok() const {
  return std::all_of(tasks.begin(), tasks.end(), [](const json& t) { return t["status"] == "ok"; });
}

namespace {

std::int64_t i64(std::size_t v) { return static_cast<std::int64_t>(v); }

SourceProfile bump_from(const json& psi) {
  double w = psi["width"].get<double>();
  return psi_bump(psi["center"].get<double>(), w, psi["mass"].get<double>(),
                  w / psi["samples"].get<double>());
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

void cmd_kernel(RunContext& ctx) {
  const json& c = ctx.config["kernel"];
  ctx.task("row_sums", [&] {
    auto n_max = c["n_max"].get<std::int64_t>();
    std::vector<double> err = parallel_map(static_cast<std::size_t>(n_max + 1), ctx.workers, [](std::size_t n) {
      return kernel_row_sum(static_cast<std::int64_t>(n)) - 1.0;
    });
    Rows rows;
    double worst = 0.0;
    for (std::size_t n = 0; n < err.size(); ++n) {
      rows.push_back({i64(n), 1.0 + err[n], std::fabs(err[n])});
      worst = std::max(worst, std::fabs(err[n]));
    }
    ctx.out->write_csv("row_sums.csv", {"n", "row_sum", "abs_error"}, rows);
    return worst <= 1e-12 ? std::string() : "row sum off by " + fmt(worst);
  });
  ctx.task("kernel_rows", [&] {
    Rows rows;
    for (auto n : c["rows"].get<std::vector<std::int64_t>>())
      for (const auto& e : kernel_row(n)) rows.push_back({n, e.k, e.value});
    ctx.out->write_csv("kernel_rows.csv", {"n", "k", "K"}, rows);
    return std::string();
  });
  ctx.task("clt_scan", [&] {
    auto ns = c["n_list"].get<std::vector<std::int64_t>>();
    std::sort(ns.begin(), ns.end());
    auto scan = clt_error_scan(ns, c["clt_delta"].get<double>(), ctx.workers);
    Rows rows;
    for (const auto& r : scan.rows) rows.push_back({r.n, r.max_error});
    ctx.out->write_csv("clt_scan.csv", {"n", "max_error"}, rows);
    ctx.out->write_csv("clt_slope.csv", {"delta", "points", "slope"},
                       {{c["clt_delta"].get<double>(), i64(scan.rows.size()), scan.slope}});
    return std::string();
  });
  ctx.task("sawtooth", [&] {
    Rows rows;
    auto samples = c["sawtooth_samples"].get<int>();
    for (int m : c["sawtooth_orders"].get<std::vector<int>>())
      for (int i = 0; i < samples; ++i) {
        double t = 2.0 * i / samples - 1.0;
        rows.push_back({static_cast<std::int64_t>(m), t, sawtooth(m, t)});
      }
    ctx.out->write_csv("sawtooth.csv", {"m", "t", "h"}, rows);
    return std::string();
  });
}

void cmd_heat_demo(RunContext& ctx) {
  const json& c = ctx.config["heat_demo"];
  ctx.task("profiles", [&] {
    std::vector<double> ys = uniform_grid(c["y_lo"].get<double>(), c["y_hi"].get<double>(), c["y_step"].get<double>());
    Rows rows;
    double worst_integer_gap = 0.0;
    for (double sigma : c["sigmas"].get<std::vector<double>>()) {
      std::vector<double> phi = parallel_map(ys.size(), ctx.workers, [&](std::size_t i) {
        return discrete_time_profile(ys[i], sigma, ctx.delta);
      });
      std::vector<double> psi = parallel_map(ys.size(), ctx.workers, [&](std::size_t i) {
        return lattice_profile(ys[i], sigma, ctx.delta);
      });
      std::vector<double> gap = parallel_map(ys.size(), ctx.workers, [&](std::size_t i) {
        return resonance_gap(ys[i], sigma, ctx.delta);
      });
      for (std::size_t i = 0; i < ys.size(); ++i) {
        rows.push_back({sigma, ys[i], phi[i], psi[i], gap[i]});
        if (sigma == std::floor(sigma)) worst_integer_gap = std::max(worst_integer_gap, std::fabs(gap[i]));
      }
    }
    ctx.out->write_csv("heat_profiles.csv", {"sigma", "y", "Phi", "Psi", "gap"}, rows);
    return worst_integer_gap < 1e-12 ? std::string() : "integer speed gap " + fmt(worst_integer_gap);
  });
  ctx.task("decay", [&] {
    auto ys = c["decay_ys"].get<std::vector<double>>();
    Rows rows;
    for (double sigma : c["sigmas"].get<std::vector<double>>()) {
      auto fit = profile_decay_fit(sigma, ys, ctx.delta);
      rows.push_back({sigma, fit.y_lo, fit.y_hi, fit.fitted_exponent});
    }
    ctx.out->write_csv("heat_decay.csv", {"sigma", "y_lo", "y_hi", "fitted_exponent"}, rows);
    return std::string();
  });
  ctx.task("tv", [&] {
    auto eps = c["epsilons"].get<std::vector<double>>();
    double step = c["step"].get<double>();
    std::vector<double> tv;
    for (double e : eps) tv.push_back(heat_tv_demo(e, ctx.delta, step, ctx.workers));
    Rows rows;
    for (std::size_t i = 0; i < eps.size(); ++i) rows.push_back({eps[i], tv[i], tv[i] / tv[0]});
    ctx.out->write_csv("heat_tv.csv", {"epsilon", "tv", "ratio_to_first"}, rows);
    double lo = *std::min_element(tv.begin(), tv.end()), hi = *std::max_element(tv.begin(), tv.end());
    ctx.out->write_csv("heat_tv_summary.csv", {"min_tv", "max_tv", "max_over_min"}, {{lo, hi, hi / lo}});
    return std::string();
  });
}

void cmd_scalar_profile(RunContext& ctx) {
  const json& c = ctx.config["scalar_profile"];
  ctx.task("profile", [&] {
    FluxSpec f = burgers_flux();
    ScalarOptions opt;
    opt.window = c["window"].get<int>();
    opt.workers = ctx.workers;
    ScalarDSP U = compute_scalar_dsp(f, c["u_minus"].get<double>(), c["u_plus"].get<double>(),
                                     c["offsets"].get<int>(), c["tol"].get<double>(),
                                     c["max_steps"].get<std::int64_t>(), opt);
    Rows rows;
    for (std::size_t i = 0; i < U.size(); ++i) rows.push_back({U.x_at(i), U.samples[i]});
    ctx.out->write_csv("profile.csv", {"x", "u"}, rows);
    double res = dsp1_residual(U);
    ctx.out->write_csv("profile_summary.csv",
                       {"speed_p", "speed_q", "offsets", "dsp1_residual", "measured_speed", "steps", "last_mismatch"},
                       {{U.speed.p, U.speed.q, static_cast<std::int64_t>(U.lattice_factor), res, U.measured_speed,
                         U.steps_used, U.last_mismatch}});
    return res < 1e-8 ? std::string() : "dsp1 residual " + fmt(res);
  });
}

void cmd_construct(RunContext& ctx) {
  const json& c = ctx.config["construct"];
  SourceProfile src = bump_from(c["psi"]);
  auto sp = c["speed"].get<std::vector<std::int64_t>>();
  RationalSpeed lam(sp[0], sp[1]);
  ctx.task("second_component", [&] {
    auto V = build_second_component(src, lam, c["x_lo"].get<double>(), c["x_hi"].get<double>(),
                                    c["per_cell"].get<int>(), ctx.delta, ctx.workers);
    Rows rows;
    for (std::size_t i = 0; i < V.profile.size(); ++i) rows.push_back({V.profile.x_at(i), V.profile.values[i]});
    ctx.out->write_csv("V.csv", {"x", "V"}, rows);
    double res = dsp2_residual(V);
    ctx.out->write_csv("V_summary.csv", {"speed_p", "speed_q", "dsp2_residual", "tail_bound"},
                       {{lam.p, lam.q, res, V.tail_bound}});
    return res < 1e-6 ? std::string() : "dsp2 residual " + fmt(res);
  });
  ctx.task("representations", [&] {
    auto count = c["probe_count"].get<std::size_t>();
    std::mt19937_64 rng(c["probe_seed"].get<std::uint64_t>());
    std::uniform_real_distribution<double> ud(c["probe_lo"].get<double>(), c["probe_hi"].get<double>());
    std::vector<double> xs(count);
    for (auto& x : xs) x = ud(rng);
    WindowAverage H = H_from_psi(src);
    std::vector<double> a = parallel_map(count, ctx.workers, [&](std::size_t i) { return V_lambda(xs[i], H, lam, ctx.delta); });
    std::vector<double> b = parallel_map(count, ctx.workers, [&](std::size_t i) { return V_via_integral(xs[i], src, lam, ctx.delta); });
    Rows rows;
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      rows.push_back({xs[i], a[i], b[i], a[i] - b[i]});
      worst = std::max(worst, std::fabs(a[i] - b[i]));
    }
    ctx.out->write_csv("representations.csv", {"x", "V_lambda", "V_via_integral", "difference"}, rows);
    return worst < 1e-6 ? std::string() : "representations differ by " + fmt(worst);
  });
}

void cmd_analysis(RunContext& ctx) {
  const json& c = ctx.config["analysis"];
  std::vector<int> ks = c["k_list"].get<std::vector<int>>();
  auto xs = c["x_list"].get<std::vector<double>>();
  ctx.task("tails", [&] {
    Rows rows;
    double d = c["tail_delta"].get<double>();
    for (double y : c["tail_y"].get<std::vector<double>>())
      rows.push_back({y, 1.0, d, tail_mass_discrete(y, 1.0, d), tail_mass_heat(y, 1.0, d, 0),
                      tail_mass_heat(y, 1.0, d, 1)});
    ctx.out->write_csv("tails.csv", {"y", "lambda", "delta", "discrete", "heat_order0", "heat_order1"}, rows);
    return std::string();
  });
  ctx.task("frac_identity", [&] {
    std::mt19937_64 rng(c["frac_seed"].get<std::uint64_t>());
    std::uniform_real_distribution<double> zd(-100.0, 100.0);
    std::uniform_int_distribution<std::int64_t> qd(1, 50), pd(-200, 200);
    double worst = 0.0;
    auto n = c["frac_samples"].get<std::int64_t>();
    for (std::int64_t i = 0; i < n; ++i) {
      std::int64_t q = qd(rng), p = pd(rng);
      while (std::gcd(p, q) != 1) p = pd(rng);
      auto [l, r] = frac_identity_check(zd(rng), p, q);
      worst = std::max(worst, std::fabs(l - r));
    }
    ctx.out->write_csv("frac_identity.csv", {"samples", "max_abs_error"}, {{n, worst}});
    return worst <= 1e-12 ? std::string() : "identity off by " + fmt(worst);
  });
  ctx.task("parity", [&] {
    Rows rows;
    std::vector<RationalSpeed> speeds{RationalSpeed(1, 2)};
    for (int k : ks) speeds.emplace_back(k, 2 * k + 1, RationalSpeed::Role::perturbed);
    auto nxi = c["xi_samples"].get<int>();
    for (const auto& s : speeds)
      for (double x : xs)
        for (int i = 0; i < nxi; ++i) {
          ProbeContext pc(x, static_cast<double>(i) / nxi, s, ctx.delta);
          rows.push_back({s.p, s.q, x, pc.xi, v_probe(pc), w_probe(pc), parity_sum(pc), decomposition_residual(pc)});
        }
    ctx.out->write_csv("parity.csv", {"p", "q", "x", "xi", "v", "w", "parity_sum", "decomposition_residual"}, rows);
    return std::string();
  });
  ctx.task("closed_form", [&] {
    Rows rows;
    for (int k : ks) {
      auto P = ResonanceParams::make(k, ctx.delta);
      for (double x : xs) {
        if (x > -50.0) continue;
        double cf = w_diff_closed_form(x, 0.0, P, c["tau_cut"].get<double>());
        double direct = w_probe(ProbeContext(x, 0.0, P.lambda, ctx.delta)) -
                        w_probe(ProbeContext(x, 0.0, P.lambda_tilde, ctx.delta));
        auto [lhs, rhs] = technical_lhs_rhs(x, P);
        rows.push_back({static_cast<std::int64_t>(k), x, cf, direct, cf - direct, lhs, rhs, lhs - rhs});
      }
    }
    ctx.out->write_csv("closed_form.csv",
                       {"k", "x", "w_diff_closed", "w_diff_direct", "difference", "tech_lhs", "tech_rhs", "tech_difference"},
                       rows);
    return std::string();
  });
}

void cmd_variation(RunContext& ctx) {
  const json& c = ctx.config["variation"];
  SourceProfile src = bump_from(c["psi"]);
  StudyOptions opt;
  opt.delta = ctx.delta;
  opt.alternation_count = c["alternation_count"].get<std::int64_t>();
  opt.step_divisor = c["step_divisor"].get<double>();
  opt.max_step = c["max_step"].get<double>();
  opt.step_override = c["step_override"].get<double>();
  opt.quad_nodes = c["quad_nodes"].get<int>();
  opt.workers = ctx.workers;
  SpeedFamily fam{c["k_list"].get<std::vector<int>>()};
  std::vector<VariationReport> reports;
  ctx.task("study", [&] {
    fam.validate();
    reports = run_study(fam, src, opt);
    Rows summary;
    std::string failed;
    for (const auto& r : reports) {
      std::string k = std::to_string(r.k);
      ctx.timings["k" + k] = r.runtime_seconds;
      if (r.ok) {
        Rows rows;
        for (std::size_t i = 0; i < r.xs.size(); ++i) rows.push_back({r.xs[i], r.dV[i]});
        ctx.out->write_csv("deltaV_k" + k + ".csv", {"x", "deltaV"}, rows);
        Rows alt;
        for (const auto& a : r.alternation)
          alt.push_back({a.n, a.y, std::string(a.odd ? "odd" : "even"), a.cutoff, a.H0});
        ctx.out->write_csv("alternation_k" + k + ".csv", {"n", "y", "parity", "cutoff", "H0"}, alt);
      } else {
        failed += (failed.empty() ? "" : "; ") + ("k=" + k + ": " + r.error);
      }
      summary.push_back({static_cast<std::int64_t>(r.k), r.epsilon.str(), r.y_lo, r.y_hi, r.sample_step,
                         r.tv_value, r.A_term, std::string(r.ok ? "OK" : "FAILED")});
    }
    ctx.out->write_csv("summary.csv", {"k", "epsilon", "y_lo", "y_hi", "sample_step", "tv", "A", "status"}, summary);
    return failed;
  });
  ctx.task("contrast", [&] {
    Rows rows;
    for (int k : c["contrast_k"].get<std::vector<int>>()) {
      auto it = std::find_if(reports.begin(), reports.end(), [&](const VariationReport& r) { return r.k == k; });
      if (it == reports.end() || !it->ok) continue;
      auto P = ResonanceParams::make(k, ctx.delta);
      double Y = it->y_hi;
      auto far = delta_V_tv(src, P, 10.0 * Y, 11.0 * Y, it->sample_step, opt.quad_nodes, ctx.workers);
      rows.push_back({static_cast<std::int64_t>(k), 10.0 * Y, 11.0 * Y, far.tv, it->tv_value,
                      it->tv_value > 0.0 ? far.tv / it->tv_value : 0.0});
    }
    ctx.out->write_csv("contrast.csv", {"k", "y_lo", "y_hi", "far_tv", "window_tv", "ratio"}, rows);
    return std::string();
  });
  ctx.task("verdict", [&] {
    std::vector<double> tv;
    for (const auto& r : reports)
      if (r.ok) tv.push_back(r.tv_value);
    std::string verdict;
    double lo = 0.0, hi = 0.0, base = 0.0;
    if (src.is_zero() || src.mass == 0.0) {
      verdict = "DEGENERATE";
    } else if (tv.empty() || tv.size() != reports.size()) {
      verdict = "FAIL";
    } else {
      lo = *std::min_element(tv.begin(), tv.end());
      hi = *std::max_element(tv.begin(), tv.end());
      base = tv.front();
      bool pass = lo > 0.0 && lo >= 0.25 * base && hi <= 4.0 * lo;
      verdict = pass ? "PASS" : "FAIL";
    }
    ctx.out->write_csv("verdict.csv", {"min_tv", "max_tv", "first_tv", "max_over_min", "verdict"},
                       {{lo, hi, base, lo > 0.0 ? hi / lo : 0.0, verdict}});
    return verdict == "FAIL" ? "TV ratio verdict FAIL" : std::string();
  });
}

}  // namespace dsp::cli
