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

// Scenario runner behind the command-line tool. Each scenario renders one or
// more CSV tables into memory; files are only written once everything has
// been computed, through a temporary file and a rename.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kerrsim/analytic.hpp"
#include "kerrsim/config.hpp"
#include "kerrsim/core.hpp"
#include "kerrsim/lindblad.hpp"
#include "kerrsim/parity.hpp"
#include "kerrsim/trajectory.hpp"

namespace kerrsim::scenarios {

using config::format_number;
using config::RunConfig;
using config::Scenario;

struct OutputTable {
  std::string suffix;  ///< appended to the output path; empty for the primary table
  std::string content;
};

struct Rendered {
  std::vector<OutputTable> tables;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string header(const RunConfig& cfg) {
  std::string h = "# kerrsim " + std::string(config::name_of(cfg.scenario)) + "\n";
  for (const auto& [key, value] : config::echo(cfg)) h += "# " + key + " = " + value + "\n";
  return h;
}

inline std::string row(std::initializer_list<std::string> cells) {
  std::string r;
  for (const auto& c : cells) {
    if (!r.empty()) r += ',';
    r += c;
  }
  return r + "\n";
}

inline std::string num(double v) { return format_number(v); }

inline std::string rates(const RunConfig& cfg) {
  const SystemParams p = cfg.resolved_params();
  const PulseShape shape = exponential_pulse(p, cfg.t0);
  std::string out = header(cfg) + row({"t", "source_rate", "p_abs", "emission_rate", "p_out"});
  const TimeGrid grid = cfg.grid();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const double tau = t - cfg.t0;
    const double nu = pulse_nu(shape, t);
    out += row({num(t), num(nu * nu), num(analytic::p_abs_exp(p, tau)),
                num(p.kappa_a * analytic::mean_na(p, tau)), num(analytic::rate_out(shape, p, t))});
  }
  return out;
}

inline Rendered histogram(const RunConfig& cfg) {
  const SystemParams p = cfg.resolved_params();
  const double b = p.displacement_scale();
  const auto samples =
      trajectory::sample_conditional_displacements(cfg.seed, p, cfg.n_trials, cfg.workers);
  trajectory::HistogramBins bins = trajectory::default_bins(p);
  bins.count = cfg.bins;
  if (!(bins.hi > bins.lo)) bins.hi = 1.0;
  trajectory::Histogram h(bins.lo, bins.hi, bins.count);
  std::size_t above_half = 0;
  for (double x : samples) {
    h.add(std::abs(x));
    if (std::abs(x) > 0.5 * std::abs(b)) ++above_half;
  }
  const auto s = trajectory::summarize(samples);
  std::string out = header(cfg) + row({"bin_lo", "bin_hi", "count"});
  for (std::size_t i = 0; i < h.bins(); ++i)
    out += row({num(h.bin_lo(i)), num(h.bin_hi(i)), std::to_string(h.count(i))});
  out += "# summary n_trials = " + std::to_string(h.n_trials()) + "\n";
  out += "# summary underflow = " + std::to_string(h.underflow()) + "\n";
  out += "# summary overflow = " + std::to_string(h.overflow()) + "\n";
  out += "# summary mean_re = " + num(s.mean.real()) + "\n";
  out += "# summary mean_im = " + num(s.mean.imag()) + "\n";
  out += "# summary variance = " + num(s.variance) + "\n";
  out += "# summary standard_error = " + num(s.standard_error) + "\n";
  out += "# summary fraction_above_half_B = " +
         num(static_cast<double>(above_half) / static_cast<double>(samples.size())) + "\n";
  return {{{"", out}}, {}};
}

inline std::string conditional(const RunConfig& cfg) {
  const SystemParams p = cfg.resolved_params();
  const auto a = analytic::conditional_stats(p);
  const auto mc = trajectory::mc_conditional_stats(cfg.seed, p, cfg.n_trials, cfg.workers);
  std::string out = header(cfg) + row({"quantity", "analytic", "monte_carlo", "standard_error"});
  out += row({"mean_re", num(a.mean.real()), num(mc.mean.real()), num(mc.standard_error)});
  out += row({"mean_im", num(a.mean.imag()), num(mc.mean.imag()), num(mc.standard_error)});
  out += row({"variance_exact", num(a.variance_exact), num(mc.variance), num(mc.variance_error)});
  out += row({"variance_paper", num(a.variance_paper), num(mc.variance), num(mc.variance_error)});
  return out;
}

inline Rendered cascade(const RunConfig& cfg) {
  if (cfg.t_start != 0.0) throw ValidationError("cascade runs start at t_start = 0");
  const SystemParams p = cfg.resolved_params();
  const auto rep = lindblad::run_cascade_scenario(p, cfg.n_b, cfg.t_end, cfg.dt, cfg.displaced,
                                                  cfg.n_points);
  std::string out = header(cfg) + row({"t", "n_c", "n_a", "re_b_d", "im_b_d", "trace_error"});
  for (std::size_t k = 0; k < rep.n_a.size(); ++k)
    out += row({num(rep.n_a.time(k)), num(rep.n_c[k]), num(rep.n_a[k]), num(rep.b_d[k].real()),
                num(rep.b_d[k].imag()), num(rep.trace_error[k])});
  double min_eig = 1.0;
  for (const auto& [t, e] : rep.min_eigenvalues) min_eig = std::min(min_eig, e);
  out += "# summary dt_used = " + num(rep.dt_used) + "\n";
  out += "# summary max_hermiticity_defect = " + num(rep.max_hermiticity_defect) + "\n";
  out += "# summary min_sampled_eigenvalue = " + num(min_eig) + "\n";
  out += "# summary top_level_population = " + num(rep.top_level_population) + "\n";
  out += "# summary slaved_regime = " + std::string(rep.slaved_regime ? "true" : "false") + "\n";
  out += "# summary slaved_deviation = " + num(rep.slaved_deviation) + "\n";
  return {{{"", out}}, rep.warnings};
}

inline Rendered parity_run(const RunConfig& cfg) {
  const SystemParams p = cfg.resolved_params();
  parity::ParityMcOptions opt;
  opt.phi = cfg.phi;
  opt.theta_points = cfg.theta_points;
  opt.bins = cfg.bins;
  opt.timing_offset = cfg.timing_offset;
  opt.probe_time = cfg.probe_time;
  opt.workers = cfg.workers;
  const auto rep = parity::parity_mc(cfg.seed, p, exponential_pulse(p, cfg.t0), cfg.n_trials,
                                     cfg.grid(), {cfg.window_begin(), cfg.window_finish()}, opt);
  std::string hist = header(cfg) + row({"case", "bin_lo", "bin_hi", "count"});
  for (const auto& c : rep.cases)
    for (std::size_t i = 0; i < c.histogram.bins(); ++i)
      hist += row({c.parity_case.label(), num(c.histogram.bin_lo(i)), num(c.histogram.bin_hi(i)),
                   std::to_string(c.histogram.count(i))});
  hist += "# summary phi = " + num(rep.phi) + "\n";
  hist += "# summary probe_time = " + num(rep.probe_time) + "\n";
  for (const auto& c : rep.cases) {
    const std::string tag = "# summary case " + c.parity_case.label() + " ";
    hist += tag + "mean_S = " + num(c.summary.mean.real()) + "\n";
    hist += tag + "variance_S = " + num(c.summary.variance) + "\n";
    hist += tag + "standard_error_S = " + num(c.summary.standard_error) + "\n";
    hist += tag + "mean_max_abs_delta = " + num(c.max_abs_delta.mean.real()) + "\n";
    hist += tag + "mean_delta_at_probe_re = " + num(c.delta_at_probe.mean.real()) + "\n";
    hist += tag + "mean_delta_at_probe_im = " + num(c.delta_at_probe.mean.imag()) + "\n";
  }
  std::string errors = header(cfg) + row({"theta", "even_as_odd", "odd_as_even", "error"});
  for (const auto& e : rep.errors)
    errors += row({num(e.theta), num(e.even_as_odd), num(e.odd_as_even), num(e.error)});
  const auto best = rep.best();
  errors += "# summary best_theta = " + num(best.theta) + "\n";
  errors += "# summary best_error = " + num(best.error) + "\n";
  return {{{"", hist}, {".errors.csv", errors}}, rep.warnings};
}

}  // namespace detail

/// Runs the scenario and returns its tables without touching the filesystem.
inline Rendered render(const RunConfig& cfg) {
  switch (cfg.scenario) {
    case Scenario::rates:
      return {{{"", detail::rates(cfg)}}, {}};
    case Scenario::histogram:
      return detail::histogram(cfg);
    case Scenario::conditional:
      return {{{"", detail::conditional(cfg)}}, {}};
    case Scenario::cascade:
      return detail::cascade(cfg);
    case Scenario::parity:
      return detail::parity_run(cfg);
    case Scenario::validate:
      return {};
  }
  return {};
}

/// Path of a table: the primary table goes to `out`, others to `out` + suffix.
/// Extra tables replace a trailing ".csv": run.csv -> run.errors.csv.
inline std::filesystem::path table_path(const std::string& out, const OutputTable& t) {
  if (t.suffix.empty()) return out;
  const bool csv = out.size() > 4 && out.ends_with(".csv");
  return std::filesystem::path((csv ? out.substr(0, out.size() - 4) : out) + t.suffix);
}

/// Writes every table through a temporary file; on failure no partial files remain.
inline void write_tables(const std::string& out, const Rendered& r) {
  std::vector<std::filesystem::path> staged;
  try {
    for (const OutputTable& t : r.tables) {
      const auto final_path = table_path(out, t);
      auto tmp = final_path;
      tmp += ".partial";
      staged.push_back(tmp);
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      f << t.content;
      f.close();
      if (!f) throw std::runtime_error("cannot write " + tmp.string());
    }
    for (std::size_t i = 0; i < r.tables.size(); ++i)
      std::filesystem::rename(staged[i], table_path(out, r.tables[i]));
  } catch (...) {
    std::error_code ec;
    for (const auto& p : staged) std::filesystem::remove(p, ec);
    throw;
  }
}

}  // namespace kerrsim::scenarios
