#include "config.hpp"

#include <fstream>
#include <sstream>

namespace dsp::cli {

extern const char* const kSchemaText;

const json& config_schema() {
  static const json schema = json::parse(kSchemaText);
  return schema;
}

namespace {

const json& deref(const json& node) {
  if (!node.contains("$ref")) return node;
  std::string ref = node["$ref"].get<std::string>();
  const std::string prefix = "#/$defs/";
  if (ref.rfind(prefix, 0) != 0) throw ConfigError("schema: unsupported $ref " + ref);
  return config_schema().at("$defs").at(ref.substr(prefix.size()));
}

std::string where(const std::string& path) { return path.empty() ? "<root>" : path; }

bool type_matches(const std::string& type, const json& v) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  return false;
}

void check(const json& schema_in, const json& v, const std::string& path) {
  const json& s = deref(schema_in);
  if (s.contains("type") && !type_matches(s["type"], v))
    throw ConfigError(where(path) + ": expected " + s["type"].get<std::string>());
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s["enum"]) found = found || e == v;
    if (!found) throw ConfigError(where(path) + ": value " + v.dump() + " not among " + s["enum"].dump());
  }
  if (v.is_number()) {
    double x = v.get<double>();
    if (s.contains("minimum") && x < s["minimum"].get<double>())
      throw ConfigError(where(path) + ": " + v.dump() + " below minimum " + s["minimum"].dump());
    if (s.contains("maximum") && x > s["maximum"].get<double>())
      throw ConfigError(where(path) + ": " + v.dump() + " above maximum " + s["maximum"].dump());
    if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
      throw ConfigError(where(path) + ": " + v.dump() + " must exceed " + s["exclusiveMinimum"].dump());
    if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>())
      throw ConfigError(where(path) + ": " + v.dump() + " must be below " + s["exclusiveMaximum"].dump());
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
      throw ConfigError(where(path) + ": needs at least " + s["minItems"].dump() + " items");
    if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
      throw ConfigError(where(path) + ": at most " + s["maxItems"].dump() + " items");
    if (s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i) check(s["items"], v[i], path + "[" + std::to_string(i) + "]");
  }
  if (v.is_object()) {
    const json empty = json::object();
    const json& props = s.contains("properties") ? s["properties"] : empty;
    for (auto it = v.begin(); it != v.end(); ++it) {
      std::string sub = path.empty() ? it.key() : path + "." + it.key();
      if (props.contains(it.key())) {
        check(props[it.key()], it.value(), sub);
      } else if (s.value("additionalProperties", true) == false) {
        throw ConfigError(where(path) + ": unknown key '" + it.key() + "'");
      }
    }
  }
}

void fill_defaults(const json& schema_in, json& v) {
  const json& s = deref(schema_in);
  if (!v.is_object() || !s.contains("properties")) return;
  for (auto it = s["properties"].begin(); it != s["properties"].end(); ++it) {
    const json& ps = deref(it.value());
    if (!v.contains(it.key())) {
      if (ps.contains("default")) v[it.key()] = ps["default"];
      else if (it.value().contains("default")) v[it.key()] = it.value()["default"];
      else continue;
    }
    fill_defaults(ps, v[it.key()]);
  }
}

}  // namespace

void validate_config(const json& config) {
  if (!config.is_object()) throw ConfigError("configuration must be a JSON object");
  check(config_schema(), config, "");
}

json resolve_config(const json& config) {
  validate_config(config);
  json out = config;
  fill_defaults(config_schema(), out);
  return out;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": malformed JSON: " + e.what());
  }
}

}  // namespace dsp::cli
