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

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kerrsim/core.hpp"

namespace kerrsim {

/// Adaptive Gauss-Kronrod integral of f over [a, b]. Throws NumericalError
/// when the estimated error stays above tol relative to the L1 norm.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-10, unsigned max_depth = 20) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  if (a == b) return 0.0;
  // The error estimate bottoms out near a few ulps of one in absolute terms, so
  // a relative target below that floor is unreachable for small integrals.
  double probe_error = 0.0;
  double probe_l1 = 0.0;
  (void)GK::integrate(f, a, b, 0, tol, &probe_error, &probe_l1);
  const double floor = 16.0 * std::numeric_limits<double>::epsilon() / std::max(probe_l1, 1e-300);
  const double target = std::max(tol, floor);

  double error = 0.0;
  double l1 = 0.0;
  const double value = GK::integrate(f, a, b, max_depth, target, &error, &l1);
  if (!std::isfinite(value)) throw NumericalError("quadrature produced a non-finite value");
  if (error > 10.0 * target * l1 && error > 1e-14) {
    throw NumericalError("quadrature did not converge (error estimate " + std::to_string(error) +
                         ")");
  }
  return value;
}

/// Complex-valued variant: real and imaginary parts integrated separately.
template <class F>
std::complex<double> integrate_complex(F&& f, double a, double b, double tol = 1e-10) {
  const double re = integrate([&](double t) { return std::real(f(t)); }, a, b, tol);
  const double im = integrate([&](double t) { return std::imag(f(t)); }, a, b, tol);
  return {re, im};
}

}  // namespace kerrsim
