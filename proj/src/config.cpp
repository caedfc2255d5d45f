#include "sbpglue/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sbpglue/errors.hpp"

namespace sbpglue {

namespace {

template <class T>
T convert(const std::string& key, const std::string& value) {
  try {
    return boost::lexical_cast<T>(value);
  } catch (const boost::bad_lexical_cast&) {
    fail(ErrorCode::ConfigParse, "bad value '" + value + "' for key '" + key + "'");
  }
}

bool convert_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  fail(ErrorCode::ConfigParse, "bad value '" + value + "' for key '" + key + "'");
}

void apply_section(RunConfig& cfg, const boost::property_tree::ptree& section) {
  for (const auto& [key, node] : section) {
    if (!node.empty()) fail(ErrorCode::ConfigParse, "nested key '" + key + "'");
    set_config_value(cfg, key, node.data());
  }
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "scenario") cfg.scenario = parse_scenario(value);
  else if (key == "q") cfg.q = convert<int>(key, value);
  else if (key == "N") cfg.n = convert<int>(key, value);
  else if (key == "alpha") cfg.alpha = convert<double>(key, value);
  else if (key == "t_final") cfg.t_final = convert<double>(key, value);
  else if (key == "dt") cfg.dt = convert<double>(key, value);
  else if (key == "output_dir") cfg.output_dir = value;
  else if (key == "refine") cfg.refine = convert_bool(key, value);
  else if (key == "levels") cfg.levels = convert<int>(key, value);
  else if (key == "interval") cfg.interval = convert<double>(key, value);
  else fail(ErrorCode::ConfigParse, "unknown key '" + key + "'");
}

RunConfig parse_run_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    fail(ErrorCode::ConfigParse, e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty())
      fail(ErrorCode::ConfigParse, "key '" + name + "' outside a section");
    if (name != "run") parse_scenario(name);  // every other section must name a scenario
  }
  RunConfig cfg;
  if (auto run = tree.get_child_optional("run")) apply_section(cfg, *run);
  if (auto over = tree.get_child_optional(scenario_name(cfg.scenario))) apply_section(cfg, *over);
  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

void validate(const RunConfig& cfg) {
  if (cfg.q < 1 || cfg.q > 5) fail(ErrorCode::UnsupportedOrder, "q must be in 1..5");
  if (cfg.n < 2 || cfg.n % 2 != 0) fail(ErrorCode::GridTooSmall, "N must be even and >= 2");
  if (!(cfg.alpha >= 0.0)) fail(ErrorCode::NegativeAlpha, "alpha must be >= 0");
  if (!(cfg.t_final >= 0.0)) fail(ErrorCode::ConfigParse, "t_final must be >= 0");
  if (cfg.levels < 1) fail(ErrorCode::ConfigParse, "levels must be >= 1");
  if (!(cfg.interval > 0.0)) fail(ErrorCode::ConfigParse, "interval must be > 0");
  if (cfg.output_dir.empty()) fail(ErrorCode::ConfigParse, "output_dir must not be empty");
}

void apply_environment(RunConfig& cfg) {
  const char* dir = std::getenv(kOutputDirEnv);
  if (dir && *dir) cfg.output_dir = dir;
}

SystemConfig to_system_config(const RunConfig& cfg) {
  SystemConfig s;
  s.scenario = cfg.scenario;
  s.q = cfg.q;
  s.n = cfg.n;
  s.alpha = cfg.alpha;
  s.refine_glue = cfg.refine;
  return s;
}

}  // namespace sbpglue
