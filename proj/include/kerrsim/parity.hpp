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

// Two-qubit parity gate: one rail of each dual-rail qubit passes through the
// cavity, and the two rails couple to the probe with opposite Kerr signs.
// Shots draw independent occupation histories per rail and propagate the probe
// exactly; the discriminator is the rotated probe quadrature integrated over a
// window, S = int_window Re[e^{i phi} (beta(t) - beta_inf)] dt.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kerrsim/analytic.hpp"
#include "kerrsim/core.hpp"
#include "kerrsim/lindblad.hpp"
#include "kerrsim/trajectory.hpp"

namespace kerrsim::parity {

using trajectory::Histogram;
using trajectory::JumpRecord;
using trajectory::McSummary;
using trajectory::Window;

struct ParityCase {
  int n1_in = 0;
  int n2_in = 0;

  int parity() const { return n1_in ^ n2_in; }
  bool odd() const { return parity() == 1; }
  std::string label() const { return std::to_string(n1_in) + std::to_string(n2_in); }
};

inline constexpr std::array<ParityCase, 4> kCases = {{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};

struct ShotRecord {
  JumpRecord rail1;
  JumpRecord rail2;
  trajectory::Occupation difference = trajectory::Occupation::constant(0);
  TimeSeries<complex> beta;  ///< probe amplitude on the grid
  complex window_integral{};  ///< int_window (beta - beta_inf) dt
};

/// Samplers for both rails. Rail 2 may be offset in time; synchronous photons use offset 0.
class ShotModel {
 public:
  ShotModel(const SystemParams& params, const PulseShape& shape, double timing_offset = 0.0)
      : params_(validate(params)),
        rail1_(shape, params),
        rail2_(shifted(shape, timing_offset), params) {}

  const SystemParams& params() const { return params_; }
  const trajectory::AbsorptionSampler& rail1() const { return rail1_; }
  const trajectory::AbsorptionSampler& rail2() const { return rail2_; }

 private:
  static PulseShape shifted(const PulseShape& shape, double offset) {
    return std::visit(
        [offset](ExponentialPulse e) -> PulseShape {
          e.t0 += offset;
          return e;
        },
        shape);
  }

  SystemParams params_;
  trajectory::AbsorptionSampler rail1_;
  trajectory::AbsorptionSampler rail2_;
};

/// Shot with given occupation records; beta starts at beta_inf.
inline ShotRecord shot_from_records(const SystemParams& params, const JumpRecord& rail1,
                                    const JumpRecord& rail2, const TimeGrid& grid, Window window) {
  const complex beta_inf = analytic::beta_steady(params);
  auto diff = trajectory::Occupation::difference(rail1, rail2);
  auto path = trajectory::propagate_displacement(diff, params, grid, complex{}, window);
  for (complex& v : path.displacement.values) v += beta_inf;
  return {rail1, rail2, std::move(diff), std::move(path.displacement), path.window_integral};
}

/// Independent occupation histories for the rails that carry a photon.
inline std::pair<JumpRecord, JumpRecord> draw_rails(RngStream& rng, const ShotModel& model,
                                                    ParityCase c, double horizon) {
  const double ka = model.params().kappa_a;
  JumpRecord r1;
  JumpRecord r2;
  if (c.n1_in) r1 = trajectory::simulate_occupation(rng, model.rail1(), ka, horizon);
  if (c.n2_in) r2 = trajectory::simulate_occupation(rng, model.rail2(), ka, horizon);
  return {r1, r2};
}

inline ShotRecord simulate_parity_shot(RngStream& rng, const ShotModel& model, ParityCase c,
                                       const TimeGrid& grid, Window window) {
  const auto [r1, r2] = draw_rails(rng, model, c, grid.t_end());
  return shot_from_records(model.params(), r1, r2, grid, window);
}

struct Discrimination {
  double s = 0.0;               ///< integrated rotated quadrature
  double max_abs_delta = 0.0;   ///< max_t |beta - beta_inf|
  complex delta_at_probe{};     ///< beta - beta_inf at the probe time
};

inline Discrimination discriminator(const ShotRecord& shot, const SystemParams& params, double phi,
                                    Window window, std::optional<double> probe_time = {}) {
  if (!(window.end > window.begin)) throw ValidationError("discriminator window is empty");
  const TimeGrid& grid = shot.beta.grid;
  std::vector<double> queries;
  if (probe_time) queries.push_back(*probe_time);
  const auto path = trajectory::propagate_displacement(shot.difference, params, grid, complex{},
                                                       window, queries);
  Discrimination d;
  d.s = std::real(std::polar(1.0, phi) * path.window_integral);
  d.max_abs_delta = path.max_abs;
  if (probe_time) d.delta_at_probe = path.queries.front();
  return d;
}

inline double project(complex z, double phi) { return std::real(std::polar(1.0, phi) * z); }

inline constexpr std::size_t kPhaseSweepPoints = 64;

/// Angle in [0, pi) maximising |Re[e^{i phi} z]| on a 64-point grid. |S| is
/// pi-periodic in phi, so the half circle covers every distinct choice.
inline double best_phase(complex z) {
  double best = 0.0;
  double best_value = -1.0;
  for (std::size_t k = 0; k < kPhaseSweepPoints; ++k) {
    const double phi = std::numbers::pi * static_cast<double>(k) / kPhaseSweepPoints;
    const double v = std::abs(project(z, phi));
    if (v > best_value) {
      best_value = v;
      best = phi;
    }
  }
  return best;
}

struct CaseResult {
  ParityCase parity_case;
  std::vector<double> s;  ///< one discriminator value per shot
  Histogram histogram;
  McSummary summary;
  McSummary max_abs_delta;   ///< of max_t |beta - beta_inf|
  McSummary delta_at_probe;  ///< of beta - beta_inf at the probe time
};

struct ThresholdRow {
  double theta;
  double even_as_odd;  ///< P(|S| > theta | even parity)
  double odd_as_even;  ///< P(|S| <= theta | odd parity)
  double error;        ///< mean of the two, equal class priors
};

struct ParityMcOptions {
  std::optional<double> phi;  ///< unset: pick by sweep on the (1,0) mean
  std::size_t theta_points = 64;
  std::size_t bins = 100;
  double timing_offset = 0.0;
  std::optional<double> probe_time;  ///< unset: time of peak mean occupation
  unsigned workers = 1;
};

struct ParityReport {
  double phi = 0.0;
  double probe_time = 0.0;
  std::vector<CaseResult> cases;
  std::vector<ThresholdRow> errors;
  std::vector<std::string> warnings;

  const CaseResult& result(ParityCase c) const {
    for (const CaseResult& r : cases)
      if (r.parity_case.n1_in == c.n1_in && r.parity_case.n2_in == c.n2_in) return r;
    throw ValidationError("unknown parity case");
  }

  ThresholdRow best() const {
    return *std::min_element(errors.begin(), errors.end(),
                             [](const auto& a, const auto& b) { return a.error < b.error; });
  }
};

/// Grid time where the single-rail mean occupation peaks.
inline double peak_occupation_time(const SystemParams& params, const PulseShape& shape,
                                   const TimeGrid& grid) {
  const double t0 = pulse_start(shape);
  double best_t = grid.t_start();
  double best = -1.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = analytic::mean_na(params, grid[k] - t0);
    if (v > best) {
      best = v;
      best_t = grid[k];
    }
  }
  return best_t;
}

/// Stream for shot `trial` of case index `case_index`; cases never share streams.
inline RngStream parity_stream(std::uint64_t seed, std::size_t case_index, std::size_t trial) {
  return RngStream(seed, (static_cast<std::uint64_t>(case_index) << 40) | trial);
}

inline ParityReport parity_mc(std::uint64_t seed, const SystemParams& params,
                              const PulseShape& shape, std::size_t n_trials,
                              const TimeGrid& grid, Window window,
                              const ParityMcOptions& options = {}) {
  if (n_trials < 100) throw ValidationError("parity Monte Carlo needs at least 100 trials");
  if (!(window.end > window.begin) || window.begin < grid.t_start() || window.end > grid.t_end())
    throw ValidationError("discriminator window must be non-empty and inside the grid");
  const ShotModel model(params, shape, options.timing_offset);

  ParityReport report;
  if (model.rail1().out_of_regime() || model.rail2().out_of_regime())
    report.warnings.push_back(
        "classical occupation model out of regime: absorption weight exceeds one and is capped");

  if (options.probe_time) {
    if (!grid.contains(*options.probe_time)) throw ValidationError("probe time outside the grid");
    report.probe_time = *options.probe_time;
  } else {
    report.probe_time = peak_occupation_time(params, shape, grid);
  }

  std::array<std::vector<complex>, 4> integrals;
  std::array<std::vector<double>, 4> peaks;
  std::array<std::vector<complex>, 4> probes;
  for (std::size_t c = 0; c < kCases.size(); ++c) {
    integrals[c].resize(n_trials);
    peaks[c].resize(n_trials);
    probes[c].resize(n_trials);
    parallel_for(n_trials, options.workers, [&](std::size_t i) {
      RngStream rng = parity_stream(seed, c, i);
      const auto [r1, r2] = draw_rails(rng, model, kCases[c], grid.t_end());
      // Only the window integral is needed; skip the per-grid-point samples.
      const TimeGrid ends(grid.t_start(), grid.t_end(), 2);
      const auto path = trajectory::propagate_displacement(
          trajectory::Occupation::difference(r1, r2), params, ends, complex{}, window,
          {report.probe_time});
      integrals[c][i] = path.window_integral;
      peaks[c][i] = path.max_abs;
      probes[c][i] = path.queries.front();
    });
  }

  if (options.phi) {
    report.phi = *options.phi;
  } else {
    complex mean_odd{};
    constexpr std::size_t kOneZero = 2;  // kCases[2] == (1, 0)
    for (const complex& z : integrals[kOneZero]) mean_odd += z;
    report.phi = best_phase(mean_odd / static_cast<double>(n_trials));
  }

  double s_max = 0.0;
  std::array<std::vector<double>, 4> s;
  for (std::size_t c = 0; c < kCases.size(); ++c) {
    s[c].resize(n_trials);
    for (std::size_t i = 0; i < n_trials; ++i) {
      s[c][i] = project(integrals[c][i], report.phi);
      s_max = std::max(s_max, std::abs(s[c][i]));
    }
  }
  const double edge = s_max > 0.0 ? 1.05 * s_max : 1.0;
  for (std::size_t c = 0; c < kCases.size(); ++c) {
    Histogram h(-edge, edge, options.bins);
    for (double v : s[c]) h.add(v);
    report.cases.push_back({kCases[c], s[c], std::move(h), trajectory::summarize(s[c]),
                            trajectory::summarize(peaks[c]), trajectory::summarize(probes[c])});
  }

  const std::size_t points = std::max<std::size_t>(options.theta_points, 2);
  const double top = s_max > 0.0 ? s_max : 1.0;
  for (std::size_t j = 0; j < points; ++j) {
    const double theta = top * static_cast<double>(j) / static_cast<double>(points - 1);
    std::size_t even_flagged = 0;
    std::size_t odd_missed = 0;
    for (std::size_t c = 0; c < kCases.size(); ++c)
      for (double v : s[c]) {
        const bool flagged = std::abs(v) > theta;
        if (kCases[c].odd() && !flagged) ++odd_missed;
        if (!kCases[c].odd() && flagged) ++even_flagged;
      }
    const double per_class = 2.0 * static_cast<double>(n_trials);
    const double e2o = static_cast<double>(even_flagged) / per_class;
    const double o2e = static_cast<double>(odd_missed) / per_class;
    report.errors.push_back({theta, e2o, o2e, 0.5 * (e2o + o2e)});
  }
  return report;
}

struct ParityLindbladReport {
  TimeSeries<complex> b_d;   ///< <b> in the displaced frame
  TimeSeries<double> n1;
  TimeSeries<double> n2;
  TimeSeries<double> target;  ///< -B (<n1> - <n2>)
  double max_deviation = 0.0;        ///< max |<b>_d - target| / (B max |<n1> - <n2>|), odd cases
  double max_abs_b = 0.0;
  double max_abs_re_b = 0.0;
  double max_trace_error = 0.0;
  double max_hermiticity_defect = 0.0;
  double min_eigenvalue = 0.0;
  double top_level_population = 0.0;
  std::vector<std::string> warnings;
};

/// Ensemble check on the five-mode space (c1, a1, c2, a2, b) in the displaced frame.
inline ParityLindbladReport parity_lindblad_check(SystemParams params, int n_b, double t_max,
                                                  double dt, ParityCase c,
                                                  std::size_t n_points = 301) {
  validate(params);
  if (n_b < 2 || n_b > 8) throw ValidationError("parity master equation needs 2 <= N_b <= 8");
  params.delta_a = 0.0;
  const auto space = lindblad::parity_space(n_b);
  const auto rho0 = lindblad::DensityMatrix::basis(space, {c.n1_in, 0, c.n2_in, 0, 0});
  const lindblad::CascadedLiouvillian gen({params, true, true}, space, lindblad::parity_rails());
  const TimeGrid grid(0.0, t_max, n_points);
  const std::vector<lindblad::Observable> obs = {
      {"b", space.annihilation("b")},
      {"n1", space.number("a1")},
      {"n2", space.number("a2")},
      {"top", space.top_levels_projector("b", 2)},
  };
  const auto r = lindblad::integrate(gen, rho0, grid, dt, obs);

  ParityLindbladReport rep{r.observable("b"), TimeSeries<double>(grid), TimeSeries<double>(grid),
                           TimeSeries<double>(grid), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, {}};
  const double b_scale = params.displacement_scale();
  double peak = 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    rep.n1[k] = r.observable("n1")[k].real();
    rep.n2[k] = r.observable("n2")[k].real();
    rep.target[k] = -b_scale * (rep.n1[k] - rep.n2[k]);
    peak = std::max(peak, std::abs(rep.n1[k] - rep.n2[k]));
    worst = std::max(worst, std::abs(rep.b_d[k] - rep.target[k]));
    rep.max_abs_b = std::max(rep.max_abs_b, std::abs(rep.b_d[k]));
    rep.max_abs_re_b = std::max(rep.max_abs_re_b, std::abs(rep.b_d[k].real()));
    rep.max_trace_error = std::max(rep.max_trace_error, r.trace_error[k]);
    rep.top_level_population = std::max(rep.top_level_population, r.observable("top")[k].real());
  }
  if (peak > 0.0 && b_scale != 0.0) rep.max_deviation = worst / (std::abs(b_scale) * peak);
  rep.max_hermiticity_defect = r.max_hermiticity_defect;
  rep.min_eigenvalue = r.min_sampled_eigenvalue();
  if (rep.top_level_population > lindblad::kTruncationThreshold)
    rep.warnings.push_back("probe truncation: increase N_b");
  if (c.odd() && rep.max_deviation > lindblad::kSlavedTolerance)
    rep.warnings.push_back("slaved approximation off by " + std::to_string(100.0 * rep.max_deviation) +
                           "% of the peak displacement (tolerance 5%)");
  return rep;
}

}  // namespace kerrsim::parity
