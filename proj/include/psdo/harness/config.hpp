#pragma once

// Experiment configuration: one flat JSON object, every key optional.
//
//   key                      default          range
//   suite                    "all"            traces | quantize-decay |
//                                             norm-continuity | chern |
//                                             wodzicki-vanish | loop-metric | all
//   seed                     42               any unsigned 64-bit integer
//   K                        4                1..8  (traces needs >= 3)
//   F                        32               1..128
//   J                        256              >= F, <= 1024
//   rank                     2                1..4
//   n_theta, n_phi           256, 512         8..2048
//   ensemble_size            100              1..10000
//   sobolev_order            0                -4..4 (s_0 for operator norms)
//   seminorm_order           2                0..4
//   m_values                 [-2..3]          each in -16..16
//   s_values                 [0, 1, 2, 3]     each in 0..8
//   decay_modes              [32, 64, 128, 256]  >= 2 entries, each >= 8
//   decay_truncations        [2, 3, 4]        each in 1..8
//   connection_count         10               0..1000
//   connection_n_theta/phi   128, 256         8..1024
//   connection_truncation    2                1..8
//   connection_cutoff        4                0..64
//   tol_trace                1e-10   relative to the product of input scales
//   tol_connection_wodzicki  1e-4
//   tol_chern                1e-5
//   tol_factorization        1e-10
//   tol_slope                0.5
//   max_norm_spread          1e3
//   tol_loop_metric          1e-10
//   out_dir                  ""      no files written when empty
//
// Unknown keys and wrongly typed values are rejected.

#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "psdo/errors.hpp"

namespace psdo::harness {

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "traces", "quantize-decay", "norm-continuity", "chern",
      "wodzicki-vanish", "loop-metric", "all"};
  return names;
}

struct ExperimentConfig {
  std::string suite = "all";
  std::uint64_t seed = 42;
  int K = 4;
  int F = 32;
  int J = 256;
  int rank = 2;
  int n_theta = 256;
  int n_phi = 512;
  int ensemble_size = 100;
  double sobolev_order = 0.0;
  int seminorm_order = 2;
  std::vector<int> m_values{-2, -1, 0, 1, 2, 3};
  std::vector<int> s_values{0, 1, 2, 3};
  std::vector<int> decay_modes{32, 64, 128, 256};
  std::vector<int> decay_truncations{2, 3, 4};
  int connection_count = 10;
  int connection_n_theta = 128;
  int connection_n_phi = 256;
  int connection_truncation = 2;
  int connection_cutoff = 4;
  double tol_trace = 1e-10;
  double tol_connection_wodzicki = 1e-4;
  double tol_chern = 1e-5;
  double tol_factorization = 1e-10;
  double tol_slope = 0.5;
  double max_norm_spread = 1e3;
  double tol_loop_metric = 1e-10;
  std::string out_dir;
};

/// Collects every violated range into one message.
inline void validate(const ExperimentConfig& c) {
  std::vector<std::string> problems;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) problems.push_back(msg);
  };
  bool known = false;
  for (const auto& n : suite_names()) known = known || n == c.suite;
  need(known, "suite: unknown suite '" + c.suite + "'");
  need(c.K >= 1 && c.K <= 8, "K: must be in 1..8");
  need(c.K >= 3 || (c.suite != "traces" && c.suite != "all"),
       "K: the traces suite needs K >= 3");
  need(c.F >= 1 && c.F <= 128, "F: must be in 1..128");
  need(c.J >= c.F && c.J <= 1024, "J: must satisfy F <= J <= 1024");
  need(c.rank >= 1 && c.rank <= 4, "rank: must be in 1..4");
  need(c.n_theta >= 8 && c.n_theta <= 2048, "n_theta: must be in 8..2048");
  need(c.n_phi >= 8 && c.n_phi <= 2048, "n_phi: must be in 8..2048");
  need(c.ensemble_size >= 1 && c.ensemble_size <= 10000,
       "ensemble_size: must be in 1..10000");
  need(c.sobolev_order >= -4 && c.sobolev_order <= 4,
       "sobolev_order: must be in -4..4");
  need(c.seminorm_order >= 0 && c.seminorm_order <= 4,
       "seminorm_order: must be in 0..4");
  for (int m : c.m_values) need(m >= -16 && m <= 16, "m_values: entries must be in -16..16");
  for (int s : c.s_values) need(s >= 0 && s <= 8, "s_values: entries must be in 0..8");
  need(c.decay_modes.size() >= 2, "decay_modes: need at least two entries");
  for (int j : c.decay_modes)
    need(j >= 8 && j <= 1024, "decay_modes: entries must be in 8..1024");
  for (int k : c.decay_truncations)
    need(k >= 1 && k <= 8, "decay_truncations: entries must be in 1..8");
  need(c.connection_count >= 0 && c.connection_count <= 1000,
       "connection_count: must be in 0..1000");
  need(c.connection_n_theta >= 8 && c.connection_n_theta <= 1024,
       "connection_n_theta: must be in 8..1024");
  need(c.connection_n_phi >= 8 && c.connection_n_phi <= 1024,
       "connection_n_phi: must be in 8..1024");
  need(c.connection_truncation >= 1 && c.connection_truncation <= 8,
       "connection_truncation: must be in 1..8");
  need(c.connection_cutoff >= 0 && c.connection_cutoff <= 64,
       "connection_cutoff: must be in 0..64");
  for (auto [name, v] : {std::pair<const char*, double>{"tol_trace", c.tol_trace},
                         {"tol_connection_wodzicki", c.tol_connection_wodzicki},
                         {"tol_chern", c.tol_chern},
                         {"tol_factorization", c.tol_factorization},
                         {"tol_slope", c.tol_slope},
                         {"max_norm_spread", c.max_norm_spread},
                         {"tol_loop_metric", c.tol_loop_metric}})
    need(v > 0.0, std::string(name) + ": must be positive");
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
}

namespace detail {

template <class T>
T get_as(const nlohmann::json& v, const std::string& key) {
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ConfigError(key + ": expected a string");
    return v.get<std::string>();
  } else if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw ConfigError(key + ": expected a number");
    return v.get<double>();
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_unsigned())
      throw ConfigError(key + ": expected a nonnegative integer");
    return v.get<std::uint64_t>();
  } else {
    if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer");
    const auto i = v.get<std::int64_t>();
    if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max())
      throw ConfigError(key + ": integer out of range");
    return static_cast<int>(i);
  }
}

inline std::vector<int> get_int_list(const nlohmann::json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError(key + ": expected a list of integers");
  std::vector<int> out;
  for (const auto& e : v) out.push_back(get_as<int>(e, key));
  return out;
}

}  // namespace detail

/// Sets one field from a JSON value; throws ConfigError for unknown keys.
inline void set_field(ExperimentConfig& c, const std::string& key,
                      const nlohmann::json& v) {
  using detail::get_as;
  using detail::get_int_list;
  if (key == "suite") c.suite = get_as<std::string>(v, key);
  else if (key == "seed") c.seed = get_as<std::uint64_t>(v, key);
  else if (key == "K") c.K = get_as<int>(v, key);
  else if (key == "F") c.F = get_as<int>(v, key);
  else if (key == "J") c.J = get_as<int>(v, key);
  else if (key == "rank") c.rank = get_as<int>(v, key);
  else if (key == "n_theta") c.n_theta = get_as<int>(v, key);
  else if (key == "n_phi") c.n_phi = get_as<int>(v, key);
  else if (key == "ensemble_size") c.ensemble_size = get_as<int>(v, key);
  else if (key == "sobolev_order") c.sobolev_order = get_as<double>(v, key);
  else if (key == "seminorm_order") c.seminorm_order = get_as<int>(v, key);
  else if (key == "m_values") c.m_values = get_int_list(v, key);
  else if (key == "s_values") c.s_values = get_int_list(v, key);
  else if (key == "decay_modes") c.decay_modes = get_int_list(v, key);
  else if (key == "decay_truncations") c.decay_truncations = get_int_list(v, key);
  else if (key == "connection_count") c.connection_count = get_as<int>(v, key);
  else if (key == "connection_n_theta") c.connection_n_theta = get_as<int>(v, key);
  else if (key == "connection_n_phi") c.connection_n_phi = get_as<int>(v, key);
  else if (key == "connection_truncation") c.connection_truncation = get_as<int>(v, key);
  else if (key == "connection_cutoff") c.connection_cutoff = get_as<int>(v, key);
  else if (key == "tol_trace") c.tol_trace = get_as<double>(v, key);
  else if (key == "tol_connection_wodzicki") c.tol_connection_wodzicki = get_as<double>(v, key);
  else if (key == "tol_chern") c.tol_chern = get_as<double>(v, key);
  else if (key == "tol_factorization") c.tol_factorization = get_as<double>(v, key);
  else if (key == "tol_slope") c.tol_slope = get_as<double>(v, key);
  else if (key == "max_norm_spread") c.max_norm_spread = get_as<double>(v, key);
  else if (key == "tol_loop_metric") c.tol_loop_metric = get_as<double>(v, key);
  else if (key == "out_dir") c.out_dir = get_as<std::string>(v, key);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

/// Applies a flat JSON object on top of c.
inline void apply_json(ExperimentConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, value] : j.items()) set_field(c, key, value);
}

inline ExperimentConfig config_from_string(const std::string& text,
                                           ExperimentConfig base = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  apply_json(base, j);
  validate(base);
  return base;
}

inline ExperimentConfig load_config(const std::string& path,
                                    ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_string(ss.str(), std::move(base));
}

/// Parses "key=value" where value is JSON (bare words are taken as strings).
inline void apply_assignment(ExperimentConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("expected key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json v;
  try {
    v = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    v = text;
  }
  set_field(c, key, v);
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  return nlohmann::json{{"suite", c.suite},
                        {"seed", c.seed},
                        {"K", c.K},
                        {"F", c.F},
                        {"J", c.J},
                        {"rank", c.rank},
                        {"n_theta", c.n_theta},
                        {"n_phi", c.n_phi},
                        {"ensemble_size", c.ensemble_size},
                        {"sobolev_order", c.sobolev_order},
                        {"seminorm_order", c.seminorm_order},
                        {"m_values", c.m_values},
                        {"s_values", c.s_values},
                        {"decay_modes", c.decay_modes},
                        {"decay_truncations", c.decay_truncations},
                        {"connection_count", c.connection_count},
                        {"connection_n_theta", c.connection_n_theta},
                        {"connection_n_phi", c.connection_n_phi},
                        {"connection_truncation", c.connection_truncation},
                        {"connection_cutoff", c.connection_cutoff},
                        {"tol_trace", c.tol_trace},
                        {"tol_connection_wodzicki", c.tol_connection_wodzicki},
                        {"tol_chern", c.tol_chern},
                        {"tol_factorization", c.tol_factorization},
                        {"tol_slope", c.tol_slope},
                        {"max_norm_spread", c.max_norm_spread},
                        {"tol_loop_metric", c.tol_loop_metric},
                        {"out_dir", c.out_dir}};
}

}  // namespace psdo::harness
