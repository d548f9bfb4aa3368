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

// Shared domain types: system parameters, pulse shapes, time grids and the
// error hierarchy used across the engines.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "kerrsim/rng.hpp"

namespace kerrsim {

using complex = std::complex<double>;
inline constexpr complex kI{0.0, 1.0};

/// exp(z) - 1 without cancellation for small |z|.
inline complex expm1(complex z) {
  const double x = z.real();
  const double y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rates and couplings in one frequency unit (conventionally gamma = 1).
struct SystemParams {
  double gamma = 1.0;    ///< source cavity decay rate
  double kappa_a = 0.5;  ///< signal mode decay rate
  double kappa_b = 4.0;  ///< probe mode decay rate
  double chi = 0.1;      ///< cross-Kerr strength
  double epsilon = 1.0;  ///< coherent drive amplitude on the probe
  double delta_a = 0.0;  ///< signal mode detuning

  /// Peak conditional probe displacement 4*chi*epsilon/kappa_b^2.
  double displacement_scale() const { return 4.0 * chi * epsilon / (kappa_b * kappa_b); }
};

inline SystemParams validate(const SystemParams& p) {
  const std::pair<const char*, double> rates[] = {
      {"gamma", p.gamma}, {"kappa_a", p.kappa_a}, {"kappa_b", p.kappa_b}};
  const std::pair<const char*, double> reals[] = {
      {"chi", p.chi}, {"epsilon", p.epsilon}, {"delta_a", p.delta_a}};
  for (const auto& [name, value] : rates) {
    if (!std::isfinite(value)) throw ValidationError(std::string(name) + " must be finite");
    if (value <= 0.0) throw ValidationError(std::string(name) + " must be positive");
  }
  for (const auto& [name, value] : reals) {
    if (!std::isfinite(value)) throw ValidationError(std::string(name) + " must be finite");
  }
  return p;
}

/// Single-photon envelope emitted by a decaying source cavity prepared at t0.
struct ExponentialPulse {
  double gamma = 1.0;
  double t0 = 0.0;
};

// Other envelopes slot in here; every consumer visits the variant.
using PulseShape = std::variant<ExponentialPulse>;

inline PulseShape exponential_pulse(const SystemParams& p, double t0 = 0.0) {
  return ExponentialPulse{p.gamma, t0};
}

inline PulseShape validate(const PulseShape& shape) {
  std::visit(
      [](const ExponentialPulse& e) {
        if (!std::isfinite(e.gamma) || e.gamma <= 0.0)
          throw ValidationError("pulse gamma must be positive");
        if (!std::isfinite(e.t0)) throw ValidationError("pulse t0 must be finite");
      },
      shape);
  return shape;
}

/// Envelope amplitude nu(t); real and non-negative.
inline double pulse_nu(const PulseShape& shape, double t) {
  return std::visit(
      [t](const ExponentialPulse& e) {
        if (t < e.t0) return 0.0;
        return std::sqrt(e.gamma) * std::exp(-0.5 * e.gamma * (t - e.t0));
      },
      shape);
}

inline double pulse_start(const PulseShape& shape) {
  return std::visit([](const ExponentialPulse& e) { return e.t0; }, shape);
}

/// Time after which the envelope carries a negligible (< e^-40) share of the photon.
inline double pulse_horizon(const PulseShape& shape) {
  return std::visit([](const ExponentialPulse& e) { return e.t0 + 40.0 / e.gamma; }, shape);
}

class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, std::size_t n_points)
      : t_start_(t_start), t_end_(t_end), n_points_(n_points) {
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start))
      throw ValidationError("time grid requires t_end > t_start");
    if (n_points < 2) throw ValidationError("time grid requires n_points >= 2");
  }

  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  std::size_t size() const { return n_points_; }
  double spacing() const { return (t_end_ - t_start_) / static_cast<double>(n_points_ - 1); }

  double operator[](std::size_t i) const {
    if (i + 1 == n_points_) return t_end_;
    return t_start_ + spacing() * static_cast<double>(i);
  }

  std::vector<double> points() const {
    std::vector<double> out(n_points_);
    for (std::size_t i = 0; i < n_points_; ++i) out[i] = (*this)[i];
    return out;
  }

  bool contains(double t) const { return t >= t_start_ && t <= t_end_; }

 private:
  double t_start_;
  double t_end_;
  std::size_t n_points_;
};

template <class T>
struct TimeSeries {
  TimeGrid grid;
  std::vector<T> values;

  TimeSeries(TimeGrid g, std::vector<T> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
      throw ValidationError("time series length does not match its grid");
  }
  explicit TimeSeries(TimeGrid g) : grid(g), values(g.size()) {}

  std::size_t size() const { return values.size(); }
  double time(std::size_t i) const { return grid[i]; }
  const T& operator[](std::size_t i) const { return values[i]; }
  T& operator[](std::size_t i) { return values[i]; }
};

/// Runs body(i) for i in [0, n) on `workers` threads using contiguous blocks.
/// Callers write per-index results and reduce them in index order afterwards,
/// which keeps outputs independent of the worker count.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t w = std::min<std::size_t>(workers, n);
  std::vector<std::exception_ptr> errors(w);
  {
    std::vector<std::jthread> threads;
    threads.reserve(w);
    for (std::size_t k = 0; k < w; ++k) {
      threads.emplace_back([&, k] {
        const std::size_t begin = n * k / w;
        const std::size_t end = n * (k + 1) / w;
        try {
          for (std::size_t i = begin; i < end; ++i) body(i);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace kerrsim
