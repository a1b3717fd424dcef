#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "output.hpp"

namespace dsp::cli {

struct RunContext {
  nlohmann::json config;  // resolved
  double delta = 0.1;
  unsigned workers = 1;
  OutputDir* out = nullptr;
  nlohmann::json tasks = nlohmann::json::array();
  nlohmann::json timings = nlohmann::json::object();

  /// Runs one task; a library or I/O failure marks it failed and returns false.
  /// `fn` returns an empty string on success or a failure verdict.
  bool task(const std::string& name, const std::function<std::string()>& fn);
  bool all_ok() const;
};

using Command = void (*)(RunContext&);
void cmd_kernel(RunContext& ctx);
void cmd_heat_demo(RunContext& ctx);
void cmd_scalar_profile(RunContext& ctx);
void cmd_construct(RunContext& ctx);
void cmd_analysis(RunContext& ctx);
void cmd_variation(RunContext& ctx);

}  // namespace dsp::cli
