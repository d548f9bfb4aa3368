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

// Closed-form results for the cavity driven by a single-photon pulse on mode a
// and a coherent probe on mode b. Everything here is a pure function and
// doubles as the reference the stochastic and master-equation engines are
// checked against.
//
// Frame convention: displacements are reported relative to the steady probe
// amplitude beta_inf = -2i epsilon / kappa_b, in which the slaved probe
// response to one resident photon is the real number -B.

#include <cmath>
#include <complex>

#include "kerrsim/core.hpp"
#include "kerrsim/quadrature.hpp"

namespace kerrsim::analytic {

namespace detail {

// Below this relative separation of gamma and kappa_a the closed forms switch
// to their series limits.
inline constexpr double kDegenerateTol = 1e-6;

inline bool degenerate(const SystemParams& p) {
  return std::abs(p.gamma - p.kappa_a) < kDegenerateTol * p.gamma;
}

// (exp(d t / 2) - 1) / d, finite as d -> 0.
inline double growth_ratio(double d, double t, bool use_series) {
  const double x = 0.5 * d * t;
  if (use_series) return 0.5 * t * (1.0 + x / 2.0 + x * x / 6.0);
  return std::expm1(x) / d;
}

// (1 - exp(-d t / 2)) / d, finite as d -> 0.
inline double decay_ratio(double d, double t, bool use_series) {
  const double x = 0.5 * d * t;
  if (use_series) return 0.5 * t * (1.0 - x / 2.0 + x * x / 6.0);
  return -std::expm1(-x) / d;
}

inline void require_matching_source(const PulseShape& shape, const SystemParams& p) {
  std::visit(
      [&](const ExponentialPulse& e) {
        if (std::abs(e.gamma - p.gamma) > 1e-12 * p.gamma)
          throw ValidationError("pulse gamma must equal the source decay rate gamma");
      },
      shape);
}

}  // namespace detail

/// Steady probe amplitude with no photon present: -2i epsilon / kappa_b.
inline complex beta_steady(const SystemParams& p) { return -2.0 * kI * p.epsilon / p.kappa_b; }

/// Intracavity probe occupation |beta_inf|^2 used as n_b in the phase xi(t).
inline double steady_probe_occupation(const SystemParams& p) {
  return std::norm(beta_steady(p));
}

/// Detuning delta_a = -chi n_b that cancels the probe-induced Kerr shift on mode a.
inline double compensating_detuning(const SystemParams& p) {
  return -p.chi * steady_probe_occupation(p);
}

/// Accumulated phase xi(t) = chi * int_0^t n_b + delta_a t.
template <class NbFn>
double xi(const SystemParams& p, NbFn&& n_b, double t) {
  if (p.chi == 0.0) return p.delta_a * t;
  return p.chi * integrate(n_b, 0.0, t, 1e-10) + p.delta_a * t;
}

inline double xi(const SystemParams& p, double n_b_const, double t) {
  return (p.chi * n_b_const + p.delta_a) * t;
}

namespace detail {

// 2 kappa_a nu(t) Re int_{t0}^{t} nu(t') e^{-kappa_a (t - t')/2} e^{i(xi(t) - xi(t'))} dt'
template <class PhaseFn>
double p_abs_with_phase(const PulseShape& shape, const SystemParams& p, PhaseFn&& phase,
                        double t) {
  const double t0 = std::max(0.0, pulse_start(shape));
  const double nu_t = pulse_nu(shape, t);
  if (t <= t0 || nu_t == 0.0) return 0.0;
  const double xi_t = phase(t);
  const auto integrand = [&](double s) {
    const double w = pulse_nu(shape, s) * std::exp(-0.5 * p.kappa_a * (t - s));
    return w * std::cos(xi_t - phase(s));
  };
  return 2.0 * p.kappa_a * nu_t * integrate(integrand, t0, t, 1e-12);
}

}  // namespace detail

/// Absorption rate for an arbitrary real envelope and probe occupation n_b(t).
template <class NbFn>
double p_abs_general(const PulseShape& shape, const SystemParams& p, NbFn&& n_b, double t) {
  return detail::p_abs_with_phase(
      shape, p, [&](double s) { return xi(p, n_b, s); }, t);
}

/// Same with a constant probe occupation, where xi(t) is linear in t.
inline double p_abs_general(const PulseShape& shape, const SystemParams& p, double n_b_const,
                            double t) {
  const double rate = p.chi * n_b_const + p.delta_a;
  return detail::p_abs_with_phase(
      shape, p, [rate](double s) { return rate * s; }, t);
}

/// Absorption rate for the exponential pulse (t0 = 0) with xi = 0.
inline double p_abs_exp(const SystemParams& p, double t) {
  if (t <= 0.0) return 0.0;
  const double d = p.gamma - p.kappa_a;
  const bool series = detail::degenerate(p);
  // Both branches equal e^{-gamma t} (e^{d t/2} - 1)/d; each keeps its exponent bounded.
  const double shape = d >= 0.0
                           ? std::exp(-0.5 * (p.gamma + p.kappa_a) * t) * detail::decay_ratio(d, t, series)
                           : std::exp(-p.gamma * t) * detail::growth_ratio(d, t, series);
  return 4.0 * p.kappa_a * p.gamma * shape;
}

/// Total absorbed weight int_0^inf p_abs_exp = 4 kappa_a / (gamma + kappa_a).
inline double absorption_total(const SystemParams& p) {
  return 4.0 * p.kappa_a / (p.gamma + p.kappa_a);
}

/// Ensemble mean photon number in mode a for the exponential pulse (t0 = 0).
inline double mean_na(const SystemParams& p, double t) {
  if (t <= 0.0) return 0.0;
  const double d = p.gamma - p.kappa_a;
  const bool series = detail::degenerate(p);
  if (d >= 0.0) {
    const double g = detail::decay_ratio(d, t, series);
    return 4.0 * p.gamma * p.kappa_a * std::exp(-p.kappa_a * t) * g * g;
  }
  const double g = detail::growth_ratio(d, t, series);
  return 4.0 * p.gamma * p.kappa_a * std::exp(-p.gamma * t) * g * g;
}

struct ProbBook {
  double source;
  double cavity;
  double outside;
};

/// Where the photon is found at time t: still in the source, in the cavity, or
/// outside both. The outside share is the complement, so the three sum to one.
inline ProbBook prob_bookkeeping(const SystemParams& p, double t) {
  const double source = t <= 0.0 ? 1.0 : std::exp(-p.gamma * t);
  const double cavity = mean_na(p, t);
  // u + fl(1 - u) rounds back to exactly 1 for u in [0, 1].
  return {source, cavity, 1.0 - (source + cavity)};
}

/// Rate of photons leaving the source/cavity system: |nu|^2 - p_abs + kappa_a <n_a>.
inline double rate_out(const PulseShape& shape, const SystemParams& p, double t) {
  detail::require_matching_source(shape, p);
  const double tau = t - pulse_start(shape);
  const double nu = pulse_nu(shape, t);
  return nu * nu - p_abs_exp(p, tau) + p.kappa_a * mean_na(p, tau);
}

/// Displacement from beta_inf after a dwell T, exact in chi.
inline complex delta_beta_exact(const SystemParams& p, double T) {
  const complex rate = 0.5 * p.kappa_b + kI * p.chi;
  const complex prefactor = 4.0 * p.epsilon * p.chi / (p.kappa_b * (p.kappa_b + 2.0 * kI * p.chi));
  return prefactor * (std::exp(-rate * T) - 1.0);
}

/// Probe amplitude after a dwell T that started from beta_inf.
inline complex beta_conditional(const SystemParams& p, double T) {
  return beta_steady(p) + delta_beta_exact(p, T);
}

/// Displacement after a dwell T to leading order in chi / kappa_b: B (e^{-kappa_b T/2} - 1).
inline double delta_beta_approx(const SystemParams& p, double T) {
  return p.displacement_scale() * std::expm1(-0.5 * p.kappa_b * T);
}

/// Exponential dwell-time density.
inline double dwell_pdf(double kappa_a, double T) {
  return T < 0.0 ? 0.0 : kappa_a * std::exp(-kappa_a * T);
}

struct CondStats {
  complex mean;
  double variance_paper;  ///< closed form as published
  double variance_exact;  ///< from the exponential-dwell moment identity
};

/// Mean and variance of delta_beta_approx(T) over T ~ Exp(kappa_a).
inline CondStats conditional_stats(const SystemParams& p) {
  const double b = p.displacement_scale();
  const double ka = p.kappa_a;
  const double kb = p.kappa_b;
  const double mean = -b * kb / (kb + 2.0 * ka);
  const double variance_paper = b * b * 2.0 * ka * kb / ((kb + 2.0 * ka) * (kb + 2.0 * ka));
  // E[e^{-sT}] = ka / (ka + s); Var = B^2 (E[e^{-kb T}] - E[e^{-kb T/2}]^2).
  const auto laplace = [ka](double s) { return ka / (ka + s); };
  const double half = laplace(0.5 * kb);
  const double variance_exact = b * b * (laplace(kb) - half * half);
  return {complex(mean, 0.0), variance_paper, std::max(0.0, variance_exact)};
}

/// Ensemble-averaged probe displacement in the slaved regime: -B <n_a(t)>.
inline complex ensemble_delta_beta(const SystemParams& p, double t) {
  return {-p.displacement_scale() * mean_na(p, t), 0.0};
}

}  // namespace kerrsim::analytic
