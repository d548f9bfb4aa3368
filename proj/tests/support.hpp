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

// Independent reference computations for the tests. Nothing here calls into
// the library's numerics; only plain types are shared.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "kerrsim/core.hpp"

namespace oracle {

using complex = std::complex<double>;

/// Composite Simpson rule with n (even) panels.
template <class F>
auto simpson(F&& f, double a, double b, std::size_t n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  auto sum = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return sum * (h / 3.0);
}

/// Fixed-step RK4 for y' = f(t, y); returns y at each multiple of `every` steps.
template <class Y, class F>
std::vector<Y> rk4(F&& f, Y y, double t0, double h, std::size_t steps, std::size_t every = 1) {
  std::vector<Y> out{y};
  double t = t0;
  for (std::size_t s = 1; s <= steps; ++s) {
    const Y k1 = f(t, y);
    const Y k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const Y k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const Y k4 = f(t + h, y + h * k3);
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t0 + h * static_cast<double>(s);
    if (s % every == 0) out.push_back(y);
  }
  return out;
}

/// Central finite difference.
template <class F>
double derivative(F&& f, double t, double h = 1e-5) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

/// Kolmogorov-Smirnov statistic of samples against a continuous cdf.
template <class Cdf>
double ks_statistic(std::vector<double> x, Cdf&& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace oracle

namespace gen {

using complex = std::complex<double>;

// Hand-rolled generators for property tests; std::mt19937_64 keeps them
// independent of the library's RNG.
struct Source {
  std::mt19937_64 engine;
  explicit Source(std::uint64_t seed) : engine(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
  complex normal_complex() {
    std::normal_distribution<double> n;
    return {n(engine), n(engine)};
  }
};

/// Parameters with every rate in [0.05, 20] and a modest Kerr coupling.
inline kerrsim::SystemParams params(Source& s) {
  kerrsim::SystemParams p;
  p.gamma = s.log_uniform(0.2, 5.0);
  p.kappa_a = s.log_uniform(0.05, 5.0);
  p.kappa_b = s.log_uniform(0.1, 20.0);
  p.chi = s.uniform(-0.5, 0.5);
  p.epsilon = s.uniform(0.0, 5.0);
  p.delta_a = 0.0;
  return p;
}

/// Random density matrix G G^dag / Tr with Gaussian G.
inline Eigen::MatrixXcd density_matrix(Source& s, Eigen::Index dim) {
  Eigen::MatrixXcd g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = s.normal_complex();
  Eigen::MatrixXcd rho = g * g.adjoint();
  return rho / rho.trace();
}

/// Random Hermitian matrix, not necessarily positive or normalised.
inline Eigen::MatrixXcd hermitian(Source& s, Eigen::Index dim) {
  Eigen::MatrixXcd g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = s.normal_complex();
  return 0.5 * (g + g.adjoint());
}

}  // namespace gen
