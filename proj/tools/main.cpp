#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>

#include "commands.hpp"
#include "config.hpp"
#include "dsp/numerics.hpp"

#ifndef DSP_LAB_VERSION
#define DSP_LAB_VERSION "0.0.0"
#endif

using namespace dsp::cli;
using nlohmann::json;

int main(int argc, char** argv) {
  CLI::App app{"Discrete shock profile experiments for the Lax-Friedrichs scheme"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  unsigned workers = 0;
  double delta = 0.0;
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads (also DSP_RESONANCE_WORKERS)")->check(CLI::PositiveNumber);
  app.add_option("--delta", delta, "window exponent in (0, 1/2)");
  app.set_version_flag("--version", DSP_LAB_VERSION);

  const std::map<std::string, std::pair<Command, std::string>> commands{
      {"kernel", {cmd_kernel, "binomial kernel rows, local CLT scan, sawtooth tables"}},
      {"heat-demo", {cmd_heat_demo, "heat analog profiles and resonance TV"}},
      {"scalar-profile", {cmd_scalar_profile, "scalar discrete shock profile"}},
      {"construct", {cmd_construct, "second component V and its two representations"}},
      {"analysis", {cmd_analysis, "tails, identity, parity sums, closed forms"}},
      {"variation", {cmd_variation, "profile difference variation study"}},
  };
  for (const auto& [name, cmd] : commands) app.add_subcommand(name, cmd.second)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  json resolved;
  try {
    json raw = config_path.empty() ? json::object() : load_config_file(config_path);
    if (app.count("--delta")) {
      if (!raw.is_object()) throw ConfigError("configuration must be a JSON object");
      raw["delta"] = delta;
    }
    resolved = resolve_config(raw);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  RunContext ctx;
  ctx.delta = resolved["delta"].get<double>();
  if (workers == 0 && resolved.contains("workers")) workers = resolved["workers"].get<unsigned>();
  ctx.workers = dsp::resolve_workers(workers);
  if (out_dir.empty()) out_dir = resolved.contains("out") ? resolved["out"].get<std::string>() : "results/" + sub;
  // Neither the destination nor the thread count affects the numbers.
  resolved.erase("out");
  resolved.erase("workers");
  ctx.config = resolved;

  auto t0 = std::chrono::steady_clock::now();
  try {
    OutputDir out(out_dir);
    ctx.out = &out;
    commands.at(sub).first(ctx);

    json manifest;
    manifest["tool"] = "dsp_lab";
    manifest["version"] = DSP_LAB_VERSION;
    manifest["subcommand"] = sub;
    manifest["config"] = ctx.config;
    manifest["config_hash"] = sha256_hex(ctx.config.dump());
    manifest["tasks"] = ctx.tasks;
    json files = json::array();
    for (const auto& f : out.files())
      files.push_back({{"path", f}, {"sha256", sha256_file(out.root() / f)},
                       {"bytes", std::filesystem::file_size(out.root() / f)}});
    manifest["files"] = files;
    {
      std::ofstream m(out.root() / "manifest.json", std::ios::trunc);
      m << manifest.dump(2) << "\n";
      if (!m) throw std::runtime_error((out.root() / "manifest.json").string() + ": write failed");
    }
    json timing;
    timing["subcommand"] = sub;
    timing["workers"] = ctx.workers;
    timing["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    timing["tasks"] = ctx.timings;
    std::ofstream t(out.root() / "timings.json", std::ios::trunc);
    t << timing.dump(2) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  for (const auto& task : ctx.tasks) {
    std::cout << sub << "/" << task["name"].get<std::string>() << ": " << task["status"].get<std::string>();
    if (task.contains("message")) std::cout << " (" << task["message"].get<std::string>() << ")";
    std::cout << "\n";
  }
  return ctx.all_ok() ? 0 : 1;
}
