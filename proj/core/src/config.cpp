#include "fedpg/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fedpg {

using nlohmann::json;

namespace {

const char* const kDefaults = R"({
  "seed": 1,
  "scenario": {
    "hotspots": 5,
    "users_per_hotspot": 10,
    "half_width_x": 500.0,
    "half_width_y": 500.0,
    "uav_altitude": 100.0,
    "uav_max_step": 12.0,
    "ris_elements": 120,
    "phase_levels": 50,
    "port_rows": 5,
    "port_cols": 5,
    "port_size_w1": 3.0,
    "port_size_w2": 3.0,
    "horizon": 30,
    "earth_radius": 6378137.0,
    "orbit_altitude": 550000.0,
    "angular_velocity": 0.001076,
    "orbit_y_offset": 0.0,
    "eirp_psd_dbw_4khz": -16.82,
    "noise_psd_dbm_hz": -174.0,
    "bandwidth_hz": 2.0e7,
    "carrier_freq_hz": 1.17e10,
    "rician_k_lr_db": 15.0,
    "rician_k_ru_db": 10.0,
    "heterogeneity": {
      "fas_ratio": 0.5,
      "fas_ratio_jitter": 0.2,
      "activation_prob": 0.8,
      "activation_jitter": 0.1,
      "center_range": 0.5,
      "cluster_std_min": 50.0,
      "cluster_std_max": 200.0
    },
    "virtual_env": {
      "center_jitter": 20.0,
      "spread_jitter": 0.1,
      "fas_ratio_jitter": 0.05,
      "activation_jitter": 0.05
    }
  },
  "training": {
    "algorithm": "fedpg_ap",
    "e0": 1,
    "sigma_close": 2.5,
    "sigma_far": 3.0,
    "step_size": 0.001,
    "batch_min": 60,
    "batch_max": 70,
    "inner_batch": 32,
    "trace_budget": 30000,
    "max_epochs": 0,
    "discount": 0.99,
    "beta_scale": 5.0,
    "weight_clip": true,
    "weight_clip_min": 0.0001,
    "weight_clip_max": 10000.0,
    "inner_loop_cap": 50,
    "hidden": [1024, 512, 256],
    "checkpoint_every": 0
  },
  "evaluation": {
    "runs": 100,
    "horizon": 30
  }
})";

std::string kind(const json& j) {
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_boolean()) return "boolean";
  if (j.is_array()) return "array";
  if (j.is_object()) return "object";
  return "null";
}

void merge_checked(json& target, const json& source, const std::string& path) {
  if (!source.is_object()) throw ConfigError(path.empty() ? "config root must be an object" : path + ": expected an object");
  for (const auto& [key, value] : source.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!target.contains(key)) throw ConfigError("unknown key '" + where + "'");
    json& slot = target[key];
    if (slot.is_object()) {
      merge_checked(slot, value, where);
    } else {
      if (kind(slot) != kind(value)) {
        throw ConfigError("'" + where + "' must be a " + kind(slot) + ", got " + kind(value));
      }
      slot = value;
    }
  }
}

void apply_override(json& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + spec + "' must look like key.path=value");
  }
  const std::string path = spec.substr(0, eq);
  const std::string text = spec.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  // Wrap the value into a nested object and merge it, reusing the key checks.
  json patch = value;
  std::string rest = path;
  std::vector<std::string> keys;
  std::size_t start = 0;
  while (true) {
    const auto dot = rest.find('.', start);
    keys.push_back(rest.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (auto it = keys.rbegin(); it != keys.rend(); ++it) {
    if (it->empty()) throw ConfigError("override '" + spec + "' has an empty key");
    patch = json{{*it, patch}};
  }
  merge_checked(root, patch, "");
}

double num(const json& j, const char* key) { return j.at(key).get<double>(); }

long long integer(const json& j, const char* key, const std::string& section) {
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v) || v != std::floor(v)) {
    throw ConfigError(section + "." + key + " must be an integer");
  }
  return static_cast<long long>(v);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

RunConfig to_run_config(const json& root) {
  RunConfig c;
  {
    const double s = root.at("seed").get<double>();
    require(s >= 0 && s == std::floor(s), "seed must be a non-negative integer");
    c.seed = root.at("seed").is_number_unsigned() ? root.at("seed").get<std::uint64_t>()
                                                  : static_cast<std::uint64_t>(s);
  }

  const json& sc = root.at("scenario");
  ScenarioTemplate& t = c.scenario;
  t.hotspots = static_cast<int>(integer(sc, "hotspots", "scenario"));
  t.users_per_hotspot = static_cast<int>(integer(sc, "users_per_hotspot", "scenario"));
  t.region = {num(sc, "half_width_x"), num(sc, "half_width_y")};
  t.uav_altitude = num(sc, "uav_altitude");
  t.uav_max_step = num(sc, "uav_max_step");
  t.ris_elements = static_cast<int>(integer(sc, "ris_elements", "scenario"));
  t.phase_levels = static_cast<int>(integer(sc, "phase_levels", "scenario"));
  t.ports = {static_cast<int>(integer(sc, "port_rows", "scenario")),
             static_cast<int>(integer(sc, "port_cols", "scenario")), num(sc, "port_size_w1"),
             num(sc, "port_size_w2")};
  t.horizon = static_cast<int>(integer(sc, "horizon", "scenario"));
  t.orbit = {num(sc, "earth_radius"), num(sc, "orbit_altitude"), num(sc, "angular_velocity"),
             num(sc, "orbit_y_offset")};
  require(num(sc, "bandwidth_hz") > 0, "scenario.bandwidth_hz must be positive");
  require(num(sc, "carrier_freq_hz") > 0, "scenario.carrier_freq_hz must be positive");
  t.budget = LinkBudget::make(num(sc, "eirp_psd_dbw_4khz"), num(sc, "noise_psd_dbm_hz"),
                              num(sc, "bandwidth_hz"), num(sc, "carrier_freq_hz"));
  t.rician = RicianParams::from_db(num(sc, "rician_k_lr_db"), num(sc, "rician_k_ru_db"),
                                   num(sc, "carrier_freq_hz"));

  require(t.hotspots >= 1, "scenario.hotspots must be >= 1");
  require(t.users_per_hotspot >= 1, "scenario.users_per_hotspot must be >= 1");
  require(t.region.half_width_x > 0 && t.region.half_width_y > 0,
          "scenario half widths must be positive");
  require(t.uav_altitude > 0, "scenario.uav_altitude must be positive");
  require(t.uav_max_step > 0, "scenario.uav_max_step must be positive");
  require(t.ris_elements >= 1 && t.phase_levels >= 1, "RIS size and phase levels must be >= 1");
  require(t.ports.rows >= 1 && t.ports.cols >= 1 && t.ports.size_w1 > 0 && t.ports.size_w2 > 0,
          "invalid port grid");
  require(t.horizon >= 1, "scenario.horizon must be >= 1");
  require(t.orbit.earth_radius > 0 && t.orbit.altitude > 0 && t.orbit.angular_velocity > 0,
          "orbit constants must be positive");
  require(t.region.half_width_x < t.orbit.earth_radius + t.orbit.altitude,
          "hotspot wider than the orbit radius");

  const json& het = sc.at("heterogeneity");
  Heterogeneity& h = c.heterogeneity;
  h.fas_ratio = num(het, "fas_ratio");
  h.fas_ratio_jitter = num(het, "fas_ratio_jitter");
  h.activation_prob = num(het, "activation_prob");
  h.activation_jitter = num(het, "activation_jitter");
  h.center_range = num(het, "center_range");
  h.cluster_std_min = num(het, "cluster_std_min");
  h.cluster_std_max = num(het, "cluster_std_max");
  require(h.fas_ratio >= 0 && h.fas_ratio <= 1, "heterogeneity.fas_ratio must lie in [0, 1]");
  require(h.activation_prob >= 0 && h.activation_prob <= 1,
          "heterogeneity.activation_prob must lie in [0, 1]");
  require(h.fas_ratio_jitter >= 0 && h.activation_jitter >= 0 && h.center_range >= 0,
          "heterogeneity jitters must be non-negative");
  require(h.cluster_std_min >= 0 && h.cluster_std_max >= h.cluster_std_min,
          "heterogeneity cluster std range is invalid");

  const json& tr = root.at("training");
  const json& ve = sc.at("virtual_env");
  TrainingConfig& k = c.training;
  k.virtual_env = {num(ve, "center_jitter"), num(ve, "spread_jitter"), num(ve, "fas_ratio_jitter"),
                   num(ve, "activation_jitter")};
  require(k.virtual_env.center_jitter >= 0 && k.virtual_env.spread_jitter >= 0 &&
              k.virtual_env.fas_ratio_jitter >= 0 && k.virtual_env.activation_jitter >= 0,
          "virtual_env jitters must be non-negative");
  try {
    k.algorithm = parse_algorithm(tr.at("algorithm").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("training.algorithm: ") + e.what());
  }
  k.e0 = static_cast<int>(integer(tr, "e0", "training"));
  k.sigma_close = num(tr, "sigma_close");
  k.sigma_far = num(tr, "sigma_far");
  k.step_size = num(tr, "step_size");
  k.batch_min = static_cast<int>(integer(tr, "batch_min", "training"));
  k.batch_max = static_cast<int>(integer(tr, "batch_max", "training"));
  k.inner_batch = static_cast<int>(integer(tr, "inner_batch", "training"));
  const long long budget = integer(tr, "trace_budget", "training");
  require(budget >= 0, "training.trace_budget must be >= 0");
  k.trace_budget = static_cast<std::uint64_t>(budget);
  k.max_epochs = static_cast<int>(integer(tr, "max_epochs", "training"));
  t.discount = num(tr, "discount");
  k.beta_scale = num(tr, "beta_scale");
  k.clip = {num(tr, "weight_clip_min"), num(tr, "weight_clip_max"),
            tr.at("weight_clip").get<bool>()};
  k.inner_loop_cap = static_cast<int>(integer(tr, "inner_loop_cap", "training"));
  k.hidden.clear();
  for (const auto& w : tr.at("hidden")) {
    require(w.is_number_integer() || w.is_number_unsigned(),
            "training.hidden entries must be integers");
    k.hidden.push_back(w.get<int>());
  }
  c.checkpoint_every = static_cast<int>(integer(tr, "checkpoint_every", "training"));

  require(k.sigma_close < k.sigma_far, "training.sigma_close must be below sigma_far");
  require(k.step_size >= 0, "training.step_size must be non-negative");
  require(k.batch_min >= 1 && k.batch_max >= k.batch_min, "training batch range is invalid");
  require(k.inner_batch >= 1, "training.inner_batch must be >= 1");
  require(k.max_epochs >= 0, "training.max_epochs must be >= 0");
  require(t.discount > 0 && t.discount < 1, "training.discount must lie in (0, 1)");
  require(k.beta_scale > 0, "training.beta_scale must be positive");
  require(k.clip.lo > 0 && k.clip.hi > k.clip.lo, "training weight clip bounds are invalid");
  require(k.inner_loop_cap >= 1, "training.inner_loop_cap must be >= 1");
  require(!k.hidden.empty(), "training.hidden must list at least one layer");
  for (int w : k.hidden) require(w >= 1, "training.hidden widths must be >= 1");
  require(k.e0 >= 0 && k.e0 <= static_cast<int>(k.hidden.size()) + 1,
          "training.e0 must lie in [0, number of layers]");
  require(c.checkpoint_every >= 0, "training.checkpoint_every must be >= 0");

  const json& ev = root.at("evaluation");
  c.eval_runs = static_cast<int>(integer(ev, "runs", "evaluation"));
  c.eval_horizon = static_cast<int>(integer(ev, "horizon", "evaluation"));
  require(c.eval_runs >= 1, "evaluation.runs must be >= 1");
  require(c.eval_horizon >= 1, "evaluation.horizon must be >= 1");

  c.resolved_json = root.dump(2) + "\n";
  return c;
}

}  // namespace

std::string default_config_json() { return json::parse(kDefaults).dump(2) + "\n"; }

RunConfig parse_config(std::string_view json_text, const std::vector<std::string>& overrides) {
  json root = json::parse(kDefaults);
  json user = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (user.is_discarded()) throw ConfigError("config is not valid JSON");
  merge_checked(root, user, "");
  for (const auto& o : overrides) apply_override(root, o);
  try {
    return to_run_config(root);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

}  // namespace fedpg
