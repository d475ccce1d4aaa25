#include "gnireg_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gnireg_cli/toml.hpp"

namespace gnireg::cli {

using nlohmann::json;

json default_config(const std::string& command) {
  json cfg = {
      {"command", command},
      {"seed", 0},
      {"threads", 1},
      {"output_dir", ""},
      {"model",
       {{"hidden", {256, 256, 256, 256, 256}}, {"activation", "relu"}, {"init", "he_uniform"}}},
      {"train",
       {{"mode", "baseline"},
        {"loss", "auto"},
        {"variant", "auto"},
        {"learning_rate", 0.001},
        {"batch_size", 512},
        {"steps", 1000},
        {"eval_every", 100},
        {"reg_eval_points", 512},
        {"fd_reg_gradient", false}}},
      {"noise", {{"mode", "additive"}, {"variance", 0.1}, {"variances", json::array()}}},
      {"data",
       {{"kind", "sinusoid"},
        {"seed", nullptr},
        {"points", 1024},
        {"test_points", 1024},
        {"freqs", {5, 10, 15, 20, 25, 30, 35, 40, 45, 50}},
        {"phases", json::array()},
        {"z_min", 0.0},
        {"z_max", 1.0},
        {"classes", 2},
        {"per_class", 100},
        {"test_per_class", 500},
        {"dim", 2},
        {"separation", 4.0},
        {"cluster_sigma", 1.0},
        {"path", ""},
        {"test_path", ""},
        {"header", false},
        {"target_columns", {-1}},
        {"task", "regression"},
        {"images", ""},
        {"labels", ""},
        {"test_images", ""},
        {"test_labels", ""}}},
      {"diagnostics",
       {{"sigmas", {0.1, 0.25, 1.0}},
        {"inits", 25},
        {"draws", 1000},
        {"batch_size", 32},
        {"probes", 32},
        {"relative_step", 1e-4},
        {"grid_points", 1024},
        {"band_from", 25},
        {"clip", true},
        {"bins", 10},
        {"alphas", {0.0, 0.5, 1.0, 2.0, 4.0}},
        {"sensitivity_draws", 20},
        {"directions", 100},
        {"flip_search", true},
        {"points", 0},
        {"freqs", {5}},
        {"amplitudes", json::array()},
        {"tone_phases", json::array()},
        {"fd_step", 1e-6}}},
  };
  if (command == "dominance") {
    cfg["model"]["activation"] = "sigmoid";
    cfg["model"]["init"] = "fan_in_uniform";
  }
  if (command == "calibrate" || command == "margin" || command == "sensitivity") {
    cfg["model"]["hidden"] = {64, 64};
    cfg["data"]["kind"] = "blobs";
    cfg["data"]["task"] = "classification";
    cfg["train"]["learning_rate"] = 0.05;
    cfg["train"]["batch_size"] = 32;
  }
  return cfg;
}

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  if (path.extension() == ".json") {
    try {
      return json::parse(ss.str());
    } catch (const json::parse_error& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  try {
    return parse_toml(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

namespace {

bool same_kind(const json& base, const json& v) {
  if (base.is_null()) return v.is_null() || v.is_number_integer();
  if (base.is_number()) {
    if (!v.is_number()) return false;
    if (base.is_number_integer() && v.is_number_float()) {
      const double d = v.get<double>();
      return std::floor(d) == d;
    }
    return true;
  }
  if (base.is_boolean()) return v.is_boolean();
  if (base.is_string()) return v.is_string();
  if (base.is_array()) return v.is_array();
  return base.is_object() == v.is_object();
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json* find(const json& cfg, const std::string& path) {
  const json* node = &cfg;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) return nullptr;
    node = &(*node)[part];
  }
  return node;
}

}  // namespace

void merge_config(json& base, const json& overrides, const std::string& path) {
  if (!overrides.is_object()) throw ConfigError((path.empty() ? "config" : path) + ": expected a table");
  for (const auto& [key, value] : overrides.items()) {
    const std::string here = join(path, key);
    if (!base.contains(key)) throw ConfigError(here + ": unknown setting");
    json& slot = base[key];
    if (!same_kind(slot, value)) {
      throw ConfigError(here + ": expected " + std::string(slot.is_null() ? "integer" : slot.type_name()) +
                        ", got " + value.type_name());
    }
    if (slot.is_object()) {
      merge_config(slot, value, here);
    } else if (slot.is_number_integer() && value.is_number_float()) {
      slot = static_cast<std::int64_t>(value.get<double>());
    } else {
      slot = value;
    }
  }
}

const json& get_node(const json& cfg, const std::string& path) {
  const json* node = find(cfg, path);
  if (!node) throw ConfigError(path + ": missing setting");
  return *node;
}

json& set_node(json& cfg, const std::string& path) {
  json* node = &cfg;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) throw ConfigError(path + ": unknown setting");
    node = &(*node)[part];
  }
  return *node;
}

double get_number(const json& cfg, const std::string& path) {
  const json& n = get_node(cfg, path);
  if (!n.is_number()) throw ConfigError(path + ": expected a number");
  return n.get<double>();
}

std::int64_t get_int(const json& cfg, const std::string& path) {
  const json& n = get_node(cfg, path);
  if (!n.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return n.get<std::int64_t>();
}

std::size_t get_count(const json& cfg, const std::string& path) {
  const auto v = get_int(cfg, path);
  if (v < 0) throw ConfigError(path + ": must be non-negative");
  return static_cast<std::size_t>(v);
}

bool get_bool(const json& cfg, const std::string& path) {
  const json& n = get_node(cfg, path);
  if (!n.is_boolean()) throw ConfigError(path + ": expected true or false");
  return n.get<bool>();
}

std::string get_string(const json& cfg, const std::string& path) {
  const json& n = get_node(cfg, path);
  if (!n.is_string()) throw ConfigError(path + ": expected a string");
  return n.get<std::string>();
}

}  // namespace gnireg::cli
