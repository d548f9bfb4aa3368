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

// Stochastic engine. The signal-mode photon number is replaced by a binary
// process n_a(t): the photon is absorbed at a time drawn from the absorption
// rate, stays for an exponentially distributed dwell, then leaves. Given a
// realisation, the probe amplitude obeys a linear ODE with piecewise-constant
// coefficients, which is propagated exactly segment by segment.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "kerrsim/analytic.hpp"
#include "kerrsim/core.hpp"
#include "kerrsim/rng.hpp"

namespace kerrsim::trajectory {

/// Absorption and emission times of one photon; n_a(t) = 1 on [t_abs, t_emit).
struct JumpRecord {
  std::optional<double> t_abs;
  std::optional<double> t_emit;
  bool truncated = false;  ///< an event fell beyond the simulated horizon

  int occupation(double t) const {
    if (!t_abs || t < *t_abs) return 0;
    return (!t_emit || t < *t_emit) ? 1 : 0;
  }

  std::optional<double> dwell() const {
    if (t_abs && t_emit) return *t_emit - *t_abs;
    return std::nullopt;
  }
};

inline double sample_dwell(RngStream& rng, double kappa_a) {
  if (!(kappa_a > 0.0)) throw ValidationError("kappa_a must be positive");
  return rng.exponential(kappa_a);
}

/// Inverse-CDF sampler for the absorption time, built once per (shape, params).
///
/// The rate is the closed form for the exponential pulse when the probe-induced
/// detuning is compensated, and the quadrature form otherwise. A photon is
/// absorbed with probability min(1, int p_abs); when the integral exceeds one
/// the single-event picture no longer reproduces the ensemble flux and
/// out_of_regime() reports it.
class AbsorptionSampler {
 public:
  static constexpr std::size_t kTablePoints = 10000;

  AbsorptionSampler(const PulseShape& shape, const SystemParams& params)
      : start_(std::max(0.0, pulse_start(validate(shape)))) {
    validate(params);
    const double n_b = analytic::steady_probe_occupation(params);
    const double detuning = params.chi * n_b + params.delta_a;
    const bool compensated =
        std::abs(detuning) <= 1e-12 * std::max(1.0, std::abs(params.chi * n_b));
    const bool closed_form = compensated && std::holds_alternative<ExponentialPulse>(shape) &&
                             std::abs(std::get<ExponentialPulse>(shape).gamma - params.gamma) <=
                                 1e-12 * params.gamma;
    const double t0 = pulse_start(shape);
    auto rate = [&](double t) {
      if (closed_form) return analytic::p_abs_exp(params, t - t0);
      return analytic::p_abs_general(shape, params, n_b, t);
    };

    const double pulse_rate = std::visit([](const ExponentialPulse& e) { return e.gamma; }, shape);
    const double slowest = std::min(pulse_rate, 0.5 * (pulse_rate + params.kappa_a));
    const double end = start_ + 40.0 / slowest;

    times_.resize(kTablePoints);
    cumulative_.resize(kTablePoints);
    const double h = (end - start_) / static_cast<double>(kTablePoints - 1);
    double acc = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < kTablePoints; ++i) {
      times_[i] = start_ + h * static_cast<double>(i);
      if (i > 0) {
        const double cell = boost::math::quadrature::gauss<double, 8>::integrate(
            rate, times_[i - 1], times_[i]);
        if (!std::isfinite(cell)) throw NumericalError("absorption rate is not finite");
        peak = std::max(peak, std::abs(cell));
        if (cell < -1e-9 * std::max(peak, 1e-300))
          throw NumericalError(
              "absorption rate turns negative; the classical occupation model is undefined for "
              "this detuning");
        acc += std::max(cell, 0.0);
      }
      cumulative_[i] = acc;
    }
    total_ = acc;
    if (!(total_ > 0.0)) throw NumericalError("absorption rate integrates to zero");
    for (double& c : cumulative_) c /= total_;
  }

  /// int p_abs over the table span.
  double total_weight() const { return total_; }
  double probability() const { return std::min(1.0, total_); }
  bool out_of_regime() const { return total_ > 1.0; }
  double table_start() const { return times_.front(); }
  double table_end() const { return times_.back(); }

  /// Normalised cumulative distribution of the absorption time.
  double cdf(double t) const {
    if (t <= times_.front()) return 0.0;
    if (t >= times_.back()) return 1.0;
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times_.begin()) - 1;
    const double f = (t - times_[i]) / (times_[i + 1] - times_[i]);
    return cumulative_[i] + f * (cumulative_[i + 1] - cumulative_[i]);
  }

  /// Absorption time given absorption, from u in [0, 1).
  double quantile(double u) const {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) return times_.back();
    const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
    if (i == 0) return times_.front();
    const double width = cumulative_[i] - cumulative_[i - 1];
    const double f = width > 0.0 ? (u - cumulative_[i - 1]) / width : 0.0;
    return times_[i - 1] + f * (times_[i] - times_[i - 1]);
  }

  std::optional<double> sample(RngStream& rng) const {
    const double u_event = rng.uniform();
    const double u_time = rng.uniform();
    if (u_event >= probability()) return std::nullopt;
    return quantile(u_time);
  }

 private:
  double start_;
  double total_ = 0.0;
  std::vector<double> times_;
  std::vector<double> cumulative_;
};

inline std::optional<double> sample_absorption(RngStream& rng, const AbsorptionSampler& sampler) {
  return sampler.sample(rng);
}

/// Absorption followed by an exponential dwell. Events later than t_max are
/// dropped and flagged as truncated.
inline JumpRecord simulate_occupation(RngStream& rng, const AbsorptionSampler& sampler,
                                      double kappa_a, double t_max) {
  if (!(t_max > 0.0)) throw ValidationError("t_max must be positive");
  JumpRecord record;
  const auto t_abs = sample_absorption(rng, sampler);
  if (!t_abs) return record;
  if (*t_abs > t_max) {
    record.truncated = true;
    return record;
  }
  record.t_abs = t_abs;
  const double t_emit = *t_abs + sample_dwell(rng, kappa_a);
  if (t_emit > t_max) {
    record.truncated = true;
  } else {
    record.t_emit = t_emit;
  }
  return record;
}

/// Integer-valued step function: `initial` before the first change point, then
/// the level attached to each change point from that time on.
class Occupation {
 public:
  struct Change {
    double time;
    int level;
  };

  static Occupation constant(int level) { return Occupation(level, {}); }

  static Occupation from_record(const JumpRecord& r) { return difference(r, JumpRecord{}); }

  /// n_1(t) - n_2(t) for two independent rails.
  static Occupation difference(const JumpRecord& r1, const JumpRecord& r2) {
    std::vector<double> times;
    for (const JumpRecord* r : {&r1, &r2}) {
      if (r->t_abs) times.push_back(*r->t_abs);
      if (r->t_emit) times.push_back(*r->t_emit);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    std::vector<Change> changes;
    int previous = 0;
    for (double t : times) {
      const int level = r1.occupation(t) - r2.occupation(t);
      if (level != previous) changes.push_back({t, level});
      previous = level;
    }
    return Occupation(0, std::move(changes));
  }

  Occupation(int initial, std::vector<Change> changes)
      : initial_(initial), changes_(std::move(changes)) {
    for (std::size_t i = 1; i < changes_.size(); ++i)
      if (!(changes_[i].time > changes_[i - 1].time))
        throw ValidationError("occupation change points must be strictly increasing");
  }

  int operator()(double t) const {
    int level = initial_;
    for (const Change& c : changes_) {
      if (t < c.time) break;
      level = c.level;
    }
    return level;
  }

  const std::vector<Change>& changes() const { return changes_; }

 private:
  int initial_;
  std::vector<Change> changes_;
};

/// Closed interval over which the probe displacement is integrated.
struct Window {
  double begin;
  double end;
};

/// Exact propagation of the displacement delta = beta - beta_inf.
struct ProbePath {
  TimeSeries<complex> displacement;  ///< beta - beta_inf on the grid
  complex window_integral{};         ///< int_window (beta - beta_inf) dt
  double max_abs = 0.0;              ///< max |beta - beta_inf| over grid and change points
  std::vector<complex> queries;      ///< displacement at the requested extra times
};

namespace detail {

// Over a segment with constant n the displacement relaxes to
// fix = -i chi n beta_inf / lambda at rate lambda = kappa_b/2 + i chi n.
struct Segment {
  complex lambda;
  complex fix;

  Segment(const SystemParams& p, int n, complex beta_inf)
      : lambda(0.5 * p.kappa_b + kI * p.chi * static_cast<double>(n)),
        fix(-kI * p.chi * static_cast<double>(n) * beta_inf / lambda) {}

  complex advance(complex delta, double dt) const {
    return fix + (delta - fix) * std::exp(-lambda * dt);
  }

  complex integral(complex delta, double dt) const {
    return fix * dt - (delta - fix) * kerrsim::expm1(-lambda * dt) / lambda;
  }
};

}  // namespace detail

inline ProbePath propagate_displacement(const Occupation& occ, const SystemParams& p,
                                        const TimeGrid& grid, complex delta0,
                                        std::optional<Window> window = std::nullopt,
                                        const std::vector<double>& query_times = {}) {
  const complex beta_inf = analytic::beta_steady(p);
  std::vector<double> stops = grid.points();
  for (const auto& c : occ.changes())
    if (grid.contains(c.time)) stops.push_back(c.time);
  if (window) {
    if (!(window->end > window->begin)) throw ValidationError("integration window is empty");
    if (window->begin < grid.t_start() || window->end > grid.t_end())
      throw ValidationError("integration window must lie inside the time grid");
    stops.push_back(window->begin);
    stops.push_back(window->end);
  }
  for (double q : query_times) {
    if (!grid.contains(q)) throw ValidationError("query time outside the time grid");
    stops.push_back(q);
  }
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  ProbePath path{TimeSeries<complex>(grid), {}, std::abs(delta0), std::vector<complex>(query_times.size())};
  complex delta = delta0;
  std::size_t next_grid = 0;
  auto record = [&](double t) {
    while (next_grid < grid.size() && grid[next_grid] <= t) {
      path.displacement[next_grid++] = delta;
    }
    for (std::size_t q = 0; q < query_times.size(); ++q)
      if (query_times[q] == t) path.queries[q] = delta;
    path.max_abs = std::max(path.max_abs, std::abs(delta));
  };
  record(stops.front());
  for (std::size_t k = 1; k < stops.size(); ++k) {
    const double a = stops[k - 1];
    const double b = stops[k];
    const detail::Segment seg(p, occ(0.5 * (a + b)), beta_inf);
    if (window && a >= window->begin && b <= window->end)
      path.window_integral += seg.integral(delta, b - a);
    delta = seg.advance(delta, b - a);
    record(b);
  }
  return path;
}

/// Probe amplitude beta(t) on the grid for a given occupation history.
inline TimeSeries<complex> integrate_probe(const Occupation& occ, const SystemParams& p,
                                           const TimeGrid& grid, complex beta0) {
  const complex beta_inf = analytic::beta_steady(p);
  ProbePath path = propagate_displacement(occ, p, grid, beta0 - beta_inf);
  for (complex& v : path.displacement.values) v += beta_inf;
  return std::move(path.displacement);
}

class Histogram {
 public:
  Histogram(double lo, double hi, std::size_t bins) : lo_(lo), hi_(hi), counts_(bins, 0) {
    if (bins == 0) throw ValidationError("histogram needs at least one bin");
    if (!(hi > lo)) throw ValidationError("histogram edges must be strictly increasing");
  }

  void add(double x) {
    ++n_trials_;
    if (x < lo_) {
      ++underflow_;
    } else if (x >= hi_) {
      ++overflow_;
    } else {
      auto i = static_cast<std::size_t>((x - lo_) / width());
      counts_[std::min(i, counts_.size() - 1)]++;
    }
  }

  void merge(const Histogram& other) {
    if (other.lo_ != lo_ || other.hi_ != hi_ || other.counts_.size() != counts_.size())
      throw ValidationError("cannot merge histograms with different binning");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    underflow_ += other.underflow_;
    overflow_ += other.overflow_;
    n_trials_ += other.n_trials_;
  }

  std::size_t bins() const { return counts_.size(); }
  double width() const { return (hi_ - lo_) / static_cast<double>(counts_.size()); }
  double bin_lo(std::size_t i) const { return lo_ + width() * static_cast<double>(i); }
  double bin_hi(std::size_t i) const {
    return i + 1 == counts_.size() ? hi_ : lo_ + width() * static_cast<double>(i + 1);
  }
  std::uint64_t count(std::size_t i) const { return counts_[i]; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t underflow() const { return underflow_; }
  std::uint64_t overflow() const { return overflow_; }
  std::uint64_t n_trials() const { return n_trials_; }

 private:
  double lo_;
  double hi_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t underflow_ = 0;
  std::uint64_t overflow_ = 0;
  std::uint64_t n_trials_ = 0;
};

struct McSummary {
  std::size_t n_trials = 0;
  complex mean{};
  double variance = 0.0;         ///< unbiased, of |z - mean|^2
  double standard_error = 0.0;   ///< sqrt(variance / n_trials)
  double variance_error = 0.0;   ///< large-sample standard error of `variance`
};

/// Two-pass summary in index order, so equal inputs give bit-identical output.
inline McSummary summarize(const std::vector<complex>& samples) {
  McSummary s;
  s.n_trials = samples.size();
  if (samples.empty()) return s;
  complex sum{};
  for (const complex& z : samples) sum += z;
  s.mean = sum / static_cast<double>(samples.size());
  if (samples.size() < 2) return s;
  double m2 = 0.0;
  double m4 = 0.0;
  for (const complex& z : samples) {
    const double d2 = std::norm(z - s.mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  const double n = static_cast<double>(samples.size());
  s.variance = m2 / (n - 1.0);
  s.standard_error = std::sqrt(s.variance / n);
  const double pop2 = m2 / n;
  s.variance_error = std::sqrt(std::max(0.0, m4 / n - pop2 * pop2) / n);
  return s;
}

inline McSummary summarize(const std::vector<double>& samples) {
  std::vector<complex> z(samples.begin(), samples.end());
  return summarize(z);
}

/// Stream index for trial i; every trial owns its stream.
inline RngStream trial_stream(std::uint64_t seed, std::uint64_t trial) {
  return RngStream(seed, trial);
}

/// Conditional displacements delta_beta_approx(T_i), T_i ~ Exp(kappa_a).
inline std::vector<double> sample_conditional_displacements(std::uint64_t seed,
                                                            const SystemParams& params,
                                                            std::size_t n_trials,
                                                            unsigned workers = 1) {
  validate(params);
  std::vector<double> out(n_trials);
  parallel_for(n_trials, workers, [&](std::size_t i) {
    RngStream rng = trial_stream(seed, i);
    out[i] = analytic::delta_beta_approx(params, sample_dwell(rng, params.kappa_a));
  });
  return out;
}

struct HistogramBins {
  double lo;
  double hi;
  std::size_t count;
};

/// 100 uniform bins on [0, 1.05 B].
inline HistogramBins default_bins(const SystemParams& p) {
  return {0.0, 1.05 * std::abs(p.displacement_scale()), 100};
}

struct DisplacementHistogram {
  Histogram histogram;  ///< of |delta beta|
  McSummary summary;    ///< of the signed displacement
};

inline DisplacementHistogram mc_delta_beta_histogram(std::uint64_t seed,
                                                     const SystemParams& params,
                                                     std::size_t n_trials,
                                                     std::optional<HistogramBins> bins = {},
                                                     unsigned workers = 1) {
  if (n_trials < 1) throw ValidationError("n_trials must be at least 1");
  const HistogramBins b = bins.value_or(default_bins(params));
  const auto samples = sample_conditional_displacements(seed, params, n_trials, workers);
  Histogram h(b.lo, b.hi, b.count);
  for (double x : samples) h.add(std::abs(x));
  return {std::move(h), summarize(samples)};
}

inline McSummary mc_conditional_stats(std::uint64_t seed, const SystemParams& params,
                                      std::size_t n_trials, unsigned workers = 1) {
  if (n_trials < 2) throw ValidationError("n_trials must be at least 2");
  return summarize(sample_conditional_displacements(seed, params, n_trials, workers));
}

/// Ensemble mean of n_a(t) on the grid over n_trials occupation records.
inline TimeSeries<double> mc_mean_occupation(std::uint64_t seed, const AbsorptionSampler& sampler,
                                             double kappa_a, const TimeGrid& grid,
                                             std::size_t n_trials, unsigned workers = 1) {
  if (n_trials < 1) throw ValidationError("n_trials must be at least 1");
  std::vector<JumpRecord> records(n_trials);
  parallel_for(n_trials, workers, [&](std::size_t i) {
    RngStream rng = trial_stream(seed, i);
    records[i] = simulate_occupation(rng, sampler, kappa_a, grid.t_end());
  });
  std::vector<std::uint64_t> counts(grid.size(), 0);
  for (const JumpRecord& r : records)
    for (std::size_t k = 0; k < grid.size(); ++k) counts[k] += static_cast<std::uint64_t>(r.occupation(grid[k]));
  TimeSeries<double> mean(grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    mean[k] = static_cast<double>(counts[k]) / static_cast<double>(n_trials);
  return mean;
}

}  // namespace kerrsim::trajectory
