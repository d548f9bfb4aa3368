// Copyright 2026 The kerrsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Flat `key = value` run configuration. Lines starting with '#' and trailing
// '# ...' are comments. Command-line overrides are applied after the file.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kerrsim/analytic.hpp"
#include "kerrsim/core.hpp"

namespace kerrsim::config {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { rates, histogram, conditional, cascade, parity, validate };

inline constexpr std::string_view kScenarioNames[] = {"rates",   "histogram", "conditional",
                                                      "cascade", "parity",    "validate"};

inline std::string scenario_list() {
  std::string out;
  for (auto name : kScenarioNames) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

inline std::string_view name_of(Scenario s) { return kScenarioNames[static_cast<int>(s)]; }

inline std::optional<Scenario> scenario_from(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kScenarioNames); ++i)
    if (kScenarioNames[i] == name) return static_cast<Scenario>(i);
  return std::nullopt;
}

struct RunConfig {
  Scenario scenario = Scenario::validate;
  SystemParams params{1.0, 0.5, 2.0, 0.02, 50.0, 0.0};
  bool compensate_detuning = true;  ///< delta_a = compensated
  double t0 = 0.0;
  double timing_offset = 0.0;
  double t_start = 0.0;
  double t_end = 20.0;
  std::size_t n_points = 401;
  std::size_t n_trials = 50000;
  std::uint64_t seed = 42;
  int n_b = 8;
  double dt = 0.0;  ///< 0 selects the engine default
  bool displaced = true;
  std::size_t bins = 100;
  std::optional<double> phi;  ///< unset: automatic
  std::optional<double> window_start;
  std::optional<double> window_end;
  std::optional<double> probe_time;
  std::size_t theta_points = 64;
  unsigned workers = 1;
  std::string out;

  /// Parameters handed to the engines, with the detuning resolved.
  SystemParams resolved_params() const {
    SystemParams p = params;
    if (compensate_detuning) p.delta_a = analytic::compensating_detuning(p);
    return p;
  }

  TimeGrid grid() const { return TimeGrid(t_start, t_end, n_points); }
  double window_begin() const { return window_start.value_or(t_start); }
  double window_finish() const { return window_end.value_or(t_end); }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v, const std::string& where) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw ParseError(where + ": " + key + " expects a number, got '" + v + "'");
  return out;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v, const std::string& where) {
  Int out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ParseError(where + ": " + key + " expects a non-negative integer, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError(where + ": " + key + " expects true or false, got '" + v + "'");
}

}  // namespace detail

/// Every accepted key, in the order they are echoed into CSV headers.
inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "scenario", "gamma",    "kappa_a",      "kappa_b",     "chi",        "epsilon",
      "delta_a",  "t0",       "timing_offset", "t_start",    "t_end",      "n_points",
      "n_trials", "seed",     "N_b",          "dt",          "displaced",  "bins",
      "phi",      "window_start", "window_end", "probe_time", "theta_points", "workers",
      "out"};
  return keys;
}

inline void assign(RunConfig& cfg, const std::string& key, const std::string& value,
                   const std::string& where) {
  using namespace detail;
  auto num = [&] { return parse_double(key, value, where); };
  auto opt_num = [&]() -> std::optional<double> {
    if (value == "auto") return std::nullopt;
    return num();
  };
  if (key == "scenario") {
    const auto s = scenario_from(value);
    if (!s) throw UsageError(where + ": unknown scenario '" + value + "'; expected one of " + scenario_list());
    cfg.scenario = *s;
  } else if (key == "gamma") cfg.params.gamma = num();
  else if (key == "kappa_a") cfg.params.kappa_a = num();
  else if (key == "kappa_b") cfg.params.kappa_b = num();
  else if (key == "chi") cfg.params.chi = num();
  else if (key == "epsilon") cfg.params.epsilon = num();
  else if (key == "delta_a") {
    cfg.compensate_detuning = value == "compensated";
    if (!cfg.compensate_detuning) cfg.params.delta_a = num();
  } else if (key == "t0") cfg.t0 = num();
  else if (key == "timing_offset") cfg.timing_offset = num();
  else if (key == "t_start") cfg.t_start = num();
  else if (key == "t_end") cfg.t_end = num();
  else if (key == "n_points") cfg.n_points = parse_int<std::size_t>(key, value, where);
  else if (key == "n_trials") cfg.n_trials = parse_int<std::size_t>(key, value, where);
  else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(key, value, where);
  else if (key == "N_b") cfg.n_b = parse_int<int>(key, value, where);
  else if (key == "dt") cfg.dt = value == "auto" ? 0.0 : num();
  else if (key == "displaced") cfg.displaced = parse_bool(key, value, where);
  else if (key == "bins") cfg.bins = parse_int<std::size_t>(key, value, where);
  else if (key == "phi") cfg.phi = opt_num();
  else if (key == "window_start") cfg.window_start = opt_num();
  else if (key == "window_end") cfg.window_end = opt_num();
  else if (key == "probe_time") cfg.probe_time = opt_num();
  else if (key == "theta_points") cfg.theta_points = parse_int<std::size_t>(key, value, where);
  else if (key == "workers") cfg.workers = parse_int<unsigned>(key, value, where);
  else if (key == "out") cfg.out = value;
  else throw ParseError(where + ": unknown key '" + key + "'");
}

/// Range checks that do not depend on the engines. Throws ValidationError.
inline void validate(const RunConfig& cfg) {
  kerrsim::validate(cfg.resolved_params());
  (void)cfg.grid();
  if (!std::isfinite(cfg.t0) || !std::isfinite(cfg.timing_offset))
    throw ValidationError("t0 and timing_offset must be finite");
  if (cfg.n_trials < 1) throw ValidationError("n_trials must be at least 1");
  if (cfg.scenario == Scenario::conditional && cfg.n_trials < 2)
    throw ValidationError("conditional needs n_trials >= 2");
  if (cfg.scenario == Scenario::parity && cfg.n_trials < 100)
    throw ValidationError("parity needs n_trials >= 100");
  if (cfg.n_b < 2) throw ValidationError("N_b must be at least 2");
  if (cfg.dt < 0.0) throw ValidationError("dt must be positive (or auto)");
  if (cfg.bins < 1) throw ValidationError("bins must be at least 1");
  if (cfg.theta_points < 2) throw ValidationError("theta_points must be at least 2");
  if (!(cfg.window_finish() > cfg.window_begin()) || cfg.window_begin() < cfg.t_start ||
      cfg.window_finish() > cfg.t_end)
    throw ValidationError("window must be non-empty and inside [t_start, t_end]");
  if (cfg.probe_time && !cfg.grid().contains(*cfg.probe_time))
    throw ValidationError("probe_time must lie inside [t_start, t_end]");
  if (cfg.phi && !std::isfinite(*cfg.phi)) throw ValidationError("phi must be finite");
}

/// Parses configuration text, applies `key=value` overrides, and validates.
/// The scenario may come from either source; a missing scenario is a usage error.
inline RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {}) {
  RunConfig cfg;
  bool have_scenario = false;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = detail::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const std::string where = "line " + std::to_string(number);
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(where + ": expected 'key = value'");
    const std::string key = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError(where + ": expected 'key = value'");
    assign(cfg, key, value, where);
    have_scenario |= key == "scenario";
  }
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    const std::string where = "override '" + o + "'";
    if (eq == std::string::npos) throw ParseError(where + ": expected key=value");
    const std::string key = detail::trim(std::string_view(o).substr(0, eq));
    const std::string value = detail::trim(std::string_view(o).substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError(where + ": expected key=value");
    assign(cfg, key, value, where);
    have_scenario |= key == "scenario";
  }
  if (!have_scenario) throw UsageError("no scenario given; expected one of " + scenario_list());
  validate(cfg);
  return cfg;
}

/// 17 significant digits, so equal doubles print identically.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// `key = value` pairs that reproduce the run. workers and out do not change results and are omitted.
inline std::vector<std::pair<std::string, std::string>> echo(const RunConfig& cfg) {
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("auto"); };
  return {
      {"scenario", std::string(name_of(cfg.scenario))},
      {"gamma", format_number(cfg.params.gamma)},
      {"kappa_a", format_number(cfg.params.kappa_a)},
      {"kappa_b", format_number(cfg.params.kappa_b)},
      {"chi", format_number(cfg.params.chi)},
      {"epsilon", format_number(cfg.params.epsilon)},
      {"delta_a", cfg.compensate_detuning ? std::string("compensated") : format_number(cfg.params.delta_a)},
      {"t0", format_number(cfg.t0)},
      {"timing_offset", format_number(cfg.timing_offset)},
      {"t_start", format_number(cfg.t_start)},
      {"t_end", format_number(cfg.t_end)},
      {"n_points", std::to_string(cfg.n_points)},
      {"n_trials", std::to_string(cfg.n_trials)},
      {"seed", std::to_string(cfg.seed)},
      {"N_b", std::to_string(cfg.n_b)},
      {"dt", cfg.dt > 0.0 ? format_number(cfg.dt) : std::string("auto")},
      {"displaced", cfg.displaced ? "true" : "false"},
      {"bins", std::to_string(cfg.bins)},
      {"phi", opt(cfg.phi)},
      {"window_start", opt(cfg.window_start)},
      {"window_end", opt(cfg.window_end)},
      {"probe_time", opt(cfg.probe_time)},
      {"theta_points", std::to_string(cfg.theta_points)},
  };
}

}  // namespace kerrsim::config
