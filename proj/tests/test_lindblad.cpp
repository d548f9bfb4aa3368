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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kerrsim/analytic.hpp"
#include "kerrsim/lindblad.hpp"
#include "support.hpp"

using namespace kerrsim;
using namespace kerrsim::lindblad;
using Catch::Approx;

namespace {

using Dense = Eigen::MatrixXcd;

Dense lowering(int dim) {
  Dense a = Dense::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Dense kron(const Dense& x, const Dense& y) {
  Dense out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

// Operators of the (c, a, b) chain assembled with explicit Kronecker products.
struct ChainOps {
  Dense c, a, b, id;
  explicit ChainOps(int n_b) {
    const Dense i2 = Dense::Identity(2, 2);
    const Dense ib = Dense::Identity(n_b, n_b);
    c = kron(lowering(2), kron(i2, ib));
    a = kron(i2, kron(lowering(2), ib));
    b = kron(i2, kron(i2, lowering(n_b)));
    id = Dense::Identity(c.rows(), c.cols());
  }
};

// Literal right-hand side: -i[H, rho] + sum D[L] rho + cascade term.
Dense literal_rhs(const SystemParams& p, const ChainOps& o, bool displaced, const Dense& rho) {
  const complex beta = analytic::beta_steady(p);
  const Dense na = o.a.adjoint() * o.a;
  const Dense nb = o.b.adjoint() * o.b;
  Dense h;
  if (displaced) {
    h = p.chi * na * (beta * o.b.adjoint() + std::conj(beta) * o.b + nb);
  } else {
    h = p.delta_a * na + p.chi * na * nb + p.epsilon * (o.b + o.b.adjoint());
  }
  return -kI * commutator(h, rho) + p.gamma * dissipator(o.c, rho) + p.kappa_a * dissipator(o.a, rho) +
         p.kappa_b * dissipator(o.b, rho) + cascade_term(o.c, o.a, p.gamma, p.kappa_a, rho);
}

SystemParams chi_zero() {
  SystemParams p;
  p.gamma = 1.0;
  p.kappa_a = 0.3;
  p.kappa_b = 2.0;
  p.chi = 0.0;
  p.epsilon = 1.0;
  return p;
}

}  // namespace

TEST_CASE("Fock space operators", "[lindblad][operators]") {
  const FockSpace space = cascade_space(5);
  CHECK(space.dimension() == 20);
  // First mode is most significant.
  CHECK(space.index_of({1, 0, 0}) == 10);
  CHECK(space.index_of({0, 1, 0}) == 5);
  CHECK(space.index_of({0, 0, 3}) == 3);
  CHECK_THROWS_AS(space.index_of({0, 2, 0}), ValidationError);
  CHECK_THROWS_AS(space.number("z"), ValidationError);
  CHECK_THROWS_AS(FockSpace({{"x", 2}, {"x", 3}}), ValidationError);

  const ChainOps ref(5);
  CHECK((Dense(space.annihilation("c")) - ref.c).cwiseAbs().maxCoeff() == 0.0);
  CHECK((Dense(space.annihilation("a")) - ref.a).cwiseAbs().maxCoeff() == 0.0);
  CHECK((Dense(space.annihilation("b")) - ref.b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((Dense(space.number("b")) - ref.b.adjoint() * ref.b).cwiseAbs().maxCoeff() < 1e-15);

  // [b, b^dag] = 1 except on the top probe level, where it is 1 - N_b.
  const Dense comm = commutator(ref.b, ref.b.adjoint());
  const Dense top = Dense(space.top_levels_projector("b", 1));
  const Dense expected = ref.id - 5.0 * top;
  CHECK((comm - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("density matrices and expectations", "[lindblad][state]") {
  const FockSpace space = cascade_space(4);
  const DensityMatrix rho = DensityMatrix::basis(space, {1, 0, 2});
  CHECK(std::abs(rho.trace() - 1.0) < 1e-15);
  CHECK(expect(space.number("c"), rho).real() == 1.0);
  CHECK(expect(space.number("b"), rho).real() == Approx(2.0));
  CHECK(rho.hermiticity_defect() == 0.0);
  CHECK(rho.min_eigenvalue() > -1e-15);
  const Vector v = coherent_amplitudes(30, complex(1.0, -0.5));
  CHECK(v.norm() == Approx(1.0));
  const FockSpace probe({{"b", 30}});
  const DensityMatrix coh = DensityMatrix::pure(probe, v);
  CHECK(std::abs(expect(probe.annihilation("b"), coh) - complex(1.0, -0.5)) < 1e-10);
  CHECK_THROWS_AS(DensityMatrix(space, Matrix::Identity(3, 3)), ValidationError);
}

TEST_CASE("generator agrees with the literal master equation", "[lindblad][generator]") {
  gen::Source s(41);
  for (int i = 0; i < 30; ++i) {
    SystemParams p = gen::params(s);
    p.delta_a = s.uniform(-1.0, 1.0);
    const int n_b = s.integer(2, 6);
    const bool displaced = i % 2 == 0;
    const FockSpace space = cascade_space(n_b);
    const ChainOps ops(n_b);
    const Dense rho = gen::density_matrix(s, static_cast<Eigen::Index>(space.dimension()));
    const Dense fast = apply_liouvillian({p, displaced, true}, space, DensityMatrix(space, rho));
    const Dense slow = literal_rhs(p, ops, displaced, rho);
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, slow.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("generator is trace preserving and Hermiticity preserving", "[lindblad][generator][property]") {
  gen::Source s(42);
  const FockSpace space = cascade_space(5);
  for (int i = 0; i < 100; ++i) {
    const SystemParams p = gen::params(s);
    const CascadedLiouvillian gen({p, i % 2 == 0, true}, space);
    const Dense rho = gen::hermitian(s, static_cast<Eigen::Index>(space.dimension()));
    const Dense d = gen.apply(rho);
    const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
    CHECK(std::abs(d.trace()) < 1e-12 * scale);
    CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() < 1e-13 * scale);
  }
}

TEST_CASE("cascade term decomposes into Lindblad form", "[lindblad][generator][property]") {
  gen::Source s(43);
  const ChainOps ops(4);
  for (int i = 0; i < 100; ++i) {
    const double g = s.log_uniform(0.1, 10.0);
    const double k = s.log_uniform(0.1, 10.0);
    const Dense rho = gen::density_matrix(s, ops.c.rows());
    CHECK(cascade_decomposition_residual(ops.c, ops.a, g, k, rho) < 1e-12);
  }
}

TEST_CASE("displaced vacuum without a photon is stationary", "[lindblad][generator]") {
  gen::Source s(44);
  const FockSpace space = cascade_space(6);
  for (int i = 0; i < 10; ++i) {
    const SystemParams p = gen::params(s);
    const DensityMatrix vac = DensityMatrix::basis(space, {0, 0, 0});
    CHECK(apply_liouvillian({p, true, true}, space, vac).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("chi = 0 cascade reproduces the closed forms", "[lindblad][integration]") {
  const SystemParams p = chi_zero();
  const FockSpace space = cascade_space(4);
  const TimeGrid grid(0.0, 10.0, 101);
  const DensityMatrix rho0 = DensityMatrix::basis(space, {1, 0, 0});
  const SparseOp adag_c = SparseOp(space.creation("a") * space.annihilation("c"));
  const std::vector<Observable> obs = {
      {"n_c", space.number("c")}, {"n_a", space.number("a")}, {"adag_c", adag_c}};
  const auto r = integrate({p, true, true}, space, rho0, grid, 1e-3, obs);
  double worst_c = 0.0, worst_a = 0.0, worst_flux = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    worst_c = std::max(worst_c, std::abs(r.observable("n_c")[k].real() - std::exp(-p.gamma * t)));
    worst_a = std::max(worst_a, std::abs(r.observable("n_a")[k].real() - analytic::mean_na(p, t)));
    // -sqrt(g k)(<a^dag c> + <c^dag a>) feeds the cavity at the absorption rate.
    const double flux = -2.0 * std::sqrt(p.gamma * p.kappa_a) * r.observable("adag_c")[k].real();
    worst_flux = std::max(worst_flux, std::abs(flux - analytic::p_abs_exp(p, t)));
  }
  CHECK(worst_c < 1e-6);
  CHECK(worst_a < 1e-6);
  CHECK(worst_flux < 1e-6);
  CHECK(r.max_hermiticity_defect < 1e-10);
  CHECK(r.min_sampled_eigenvalue() > -1e-8);
}

TEST_CASE("RK4 converges at fourth order", "[lindblad][integration]") {
  SystemParams p = chi_zero();
  p.chi = 0.3;
  p.epsilon = 0.5;
  const FockSpace space = cascade_space(5);
  const TimeGrid grid(0.0, 4.0, 2);
  const DensityMatrix rho0 = DensityMatrix::basis(space, {1, 0, 0});
  const std::vector<Observable> obs = {{"b", space.annihilation("b")}, {"n_a", space.number("a")}};
  auto final_state = [&](double dt) {
    IntegrationOptions o;
    o.keep_snapshots = true;
    return integrate({p, true, true}, space, rho0, grid, dt, obs, o).snapshots.back().matrix();
  };
  const Dense ref = final_state(0.4 / 64);
  const double e1 = (final_state(0.4) - ref).cwiseAbs().maxCoeff();
  const double e2 = (final_state(0.2) - ref).cwiseAbs().maxCoeff();
  CHECK(e1 > 1e-10);
  CHECK(e2 / e1 <= 1.0 / 15.0);
}

TEST_CASE("step is shrunk to divide each grid interval", "[lindblad][integration]") {
  const SystemParams p = chi_zero();
  const FockSpace space = cascade_space(4);
  const auto r = integrate({p, true, true}, space, DensityMatrix::basis(space, {1, 0, 0}), TimeGrid(0.0, 1.0, 4),
                           0.1, {});
  CHECK(r.dt_used == Approx(1.0 / 3.0 / 4.0));
  const CascadedLiouvillian gen({p, true, true}, space);
  CHECK(gen.default_dt() > 0.0);
  CHECK(gen.default_dt() <= 0.05 / p.kappa_b);
}

TEST_CASE("unstable steps are reported, not returned", "[lindblad][integration]") {
  SystemParams p = chi_zero();
  p.kappa_b = 50.0;
  const FockSpace space = cascade_space(8);
  CHECK_THROWS_AS(integrate({p, true, true}, space, DensityMatrix::basis(space, {1, 0, 3}),
                            TimeGrid(0.0, 400.0, 101), 4.0, {}),
                  NumericalError);
}

TEST_CASE("displaced and undisplaced frames agree", "[lindblad][frames]") {
  SystemParams p;
  p.gamma = 1.0;
  p.kappa_a = 0.3;
  p.kappa_b = 2.0;
  p.chi = 0.2;
  p.epsilon = 0.25;
  // The displaced frame absorbs chi |beta_inf|^2 into the signal detuning.
  SystemParams lab_params = p;
  lab_params.delta_a = analytic::compensating_detuning(p);
  const auto lab = run_cascade_scenario(lab_params, 16, 8.0, 2e-3, false, 81);
  const auto shifted = run_cascade_scenario(p, 8, 8.0, 2e-3, true, 81);
  double worst = 0.0;
  for (std::size_t k = 0; k < lab.b_d.size(); ++k) {
    worst = std::max(worst, std::abs(lab.b_d[k] - shifted.b_d[k]));
    CHECK(std::abs(lab.n_a[k] - shifted.n_a[k]) < 1e-8);
  }
  CHECK(worst < 1e-6 * std::max(1.0, std::abs(analytic::beta_steady(p))));
  CHECK(lab.warnings.empty());
}

TEST_CASE("cascade scenario validation", "[lindblad][scenario]") {
  SystemParams p = chi_zero();
  CHECK_THROWS_AS(run_cascade_scenario(p, 3, 1.0, 0.01, true), ValidationError);
  p.epsilon = 1.0;
  CHECK_THROWS_AS(run_cascade_scenario(p, 16, 1.0, 0.01, false), ValidationError);
  p.epsilon = 0.1;
  CHECK_THROWS_AS(run_cascade_scenario(p, 8, 1.0, 0.01, false), ValidationError);
}

TEST_CASE("slaved displacement in a strongly damped probe", "[lindblad][scenario]") {
  SystemParams p;
  p.gamma = 1.0;
  p.kappa_a = 0.1;
  p.kappa_b = 20.0;
  p.chi = 0.05;
  p.epsilon = 100.0;
  const auto rep = run_cascade_scenario(p, 8, 60.0, 0.0, true, 601);
  CHECK(rep.slaved_regime);
  CHECK(rep.slaved_deviation < kSlavedTolerance);
  CHECK(rep.slaved_within_tolerance);
  // The tail still follows the slowly draining signal mode.
  const double b = p.displacement_scale();
  CHECK(std::abs(rep.b_d.values.back() + b * rep.n_a.values.back()) < 0.05 * b * rep.n_a.values.back());
  CHECK(rep.top_level_population < kTruncationThreshold);
  // Ensemble displacement is real and negative where the photon sits.
  const std::size_t peak = static_cast<std::size_t>(
      std::max_element(rep.n_a.values.begin(), rep.n_a.values.end()) - rep.n_a.values.begin());
  CHECK(rep.b_d[peak].real() < 0.0);
  CHECK(std::abs(rep.b_d[peak].imag()) < 0.05 * std::abs(rep.b_d[peak].real()));
}
