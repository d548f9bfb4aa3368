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

// Cascaded master-equation engine. A source cavity c (prepared in |1>) feeds
// the signal mode a through a unidirectional channel; a is cross-Kerr coupled
// to the probe mode b. Modes are embedded in a truncated tensor-product Fock
// space, with the first listed mode most significant (c, a, b for one rail).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "kerrsim/analytic.hpp"
#include "kerrsim/core.hpp"

namespace kerrsim::lindblad {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseOp = Eigen::SparseMatrix<complex, Eigen::RowMajor>;

struct Mode {
  std::string label;
  int dim;
};

class FockSpace {
 public:
  explicit FockSpace(std::vector<Mode> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) throw ValidationError("Fock space needs at least one mode");
    dimension_ = 1;
    for (const Mode& m : modes_) {
      if (m.dim < 2) throw ValidationError("mode " + m.label + " needs dimension >= 2");
      for (const Mode& other : modes_)
        if (&other != &m && other.label == m.label)
          throw ValidationError("duplicate mode label " + m.label);
      dimension_ *= static_cast<std::size_t>(m.dim);
    }
    strides_.assign(modes_.size(), 1);
    for (std::size_t k = modes_.size() - 1; k > 0; --k)
      strides_[k - 1] = strides_[k] * static_cast<std::size_t>(modes_[k].dim);

    const auto n = static_cast<Eigen::Index>(dimension_);
    for (std::size_t k = 0; k < modes_.size(); ++k) {
      std::vector<Eigen::Triplet<complex>> lower;
      std::vector<Eigen::Triplet<complex>> count;
      for (std::size_t idx = 0; idx < dimension_; ++idx) {
        const int level = static_cast<int>((idx / strides_[k]) % static_cast<std::size_t>(modes_[k].dim));
        if (level > 0)
          lower.emplace_back(static_cast<Eigen::Index>(idx - strides_[k]),
                             static_cast<Eigen::Index>(idx), std::sqrt(static_cast<double>(level)));
        if (level > 0)
          count.emplace_back(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx),
                             static_cast<double>(level));
      }
      SparseOp a(n, n);
      a.setFromTriplets(lower.begin(), lower.end());
      SparseOp num(n, n);
      num.setFromTriplets(count.begin(), count.end());
      annihilation_.push_back(a);
      creation_.push_back(SparseOp(a.adjoint()));
      number_.push_back(num);
    }
  }

  std::size_t dimension() const { return dimension_; }
  const std::vector<Mode>& modes() const { return modes_; }

  std::size_t mode_index(std::string_view label) const {
    for (std::size_t k = 0; k < modes_.size(); ++k)
      if (modes_[k].label == label) return k;
    throw ValidationError("unknown mode " + std::string(label));
  }

  int dim(std::string_view label) const { return modes_[mode_index(label)].dim; }
  const SparseOp& annihilation(std::string_view label) const { return annihilation_[mode_index(label)]; }
  const SparseOp& creation(std::string_view label) const { return creation_[mode_index(label)]; }
  const SparseOp& number(std::string_view label) const { return number_[mode_index(label)]; }

  SparseOp identity() const {
    SparseOp id(static_cast<Eigen::Index>(dimension_), static_cast<Eigen::Index>(dimension_));
    id.setIdentity();
    return id;
  }

  /// Basis index of the product state with the given per-mode occupations.
  std::size_t index_of(const std::vector<int>& levels) const {
    if (levels.size() != modes_.size()) throw ValidationError("occupation vector has wrong length");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < modes_.size(); ++k) {
      if (levels[k] < 0 || levels[k] >= modes_[k].dim) throw ValidationError("occupation out of range");
      idx += strides_[k] * static_cast<std::size_t>(levels[k]);
    }
    return idx;
  }

  /// Projector onto the top `levels` Fock states of one mode.
  SparseOp top_levels_projector(std::string_view label, int levels) const {
    const std::size_t k = mode_index(label);
    std::vector<Eigen::Triplet<complex>> t;
    for (std::size_t idx = 0; idx < dimension_; ++idx) {
      const int level = static_cast<int>((idx / strides_[k]) % static_cast<std::size_t>(modes_[k].dim));
      if (level >= modes_[k].dim - levels)
        t.emplace_back(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx), 1.0);
    }
    SparseOp p(static_cast<Eigen::Index>(dimension_), static_cast<Eigen::Index>(dimension_));
    p.setFromTriplets(t.begin(), t.end());
    return p;
  }

 private:
  std::vector<Mode> modes_;
  std::size_t dimension_ = 0;
  std::vector<std::size_t> strides_;
  std::vector<SparseOp> annihilation_;
  std::vector<SparseOp> creation_;
  std::vector<SparseOp> number_;
};

inline FockSpace build_space(std::vector<Mode> modes) { return FockSpace(std::move(modes)); }

/// Source c, signal a (both two-level: at most one photon lives in the chain) and probe b.
inline FockSpace cascade_space(int n_b) { return FockSpace({{"c", 2}, {"a", 2}, {"b", n_b}}); }

/// Two rails (c1 -> a1, c2 -> a2) sharing the probe b.
inline FockSpace parity_space(int n_b) {
  return FockSpace({{"c1", 2}, {"a1", 2}, {"c2", 2}, {"a2", 2}, {"b", n_b}});
}

class DensityMatrix {
 public:
  DensityMatrix(const FockSpace& space, Matrix rho) : rho_(std::move(rho)) {
    const auto d = static_cast<Eigen::Index>(space.dimension());
    if (rho_.rows() != d || rho_.cols() != d)
      throw ValidationError("density matrix does not match the Fock space dimension");
  }

  /// |psi><psi| for a normalised copy of psi.
  static DensityMatrix pure(const FockSpace& space, const Vector& psi) {
    const Vector v = psi / psi.norm();
    return DensityMatrix(space, v * v.adjoint());
  }

  /// Product basis state with the given occupations.
  static DensityMatrix basis(const FockSpace& space, const std::vector<int>& levels) {
    Vector psi = Vector::Zero(static_cast<Eigen::Index>(space.dimension()));
    psi(static_cast<Eigen::Index>(space.index_of(levels))) = 1.0;
    return pure(space, psi);
  }

  const Matrix& matrix() const { return rho_; }
  Matrix& matrix() { return rho_; }
  std::size_t dimension() const { return static_cast<std::size_t>(rho_.rows()); }

  complex trace() const { return rho_.trace(); }
  double hermiticity_defect() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

  double min_eigenvalue() const {
    const Matrix h = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }

 private:
  Matrix rho_;
};

/// Tr(O rho).
inline complex expect(const SparseOp& op, const Matrix& rho) {
  if (op.rows() != rho.rows() || op.cols() != rho.cols())
    throw ValidationError("operator and state dimensions differ");
  complex sum{};
  for (Eigen::Index i = 0; i < op.outerSize(); ++i)
    for (SparseOp::InnerIterator it(op, i); it; ++it) sum += it.value() * rho(it.col(), it.row());
  return sum;
}

inline complex expect(const SparseOp& op, const DensityMatrix& rho) { return expect(op, rho.matrix()); }

inline complex expect(const Matrix& op, const Matrix& rho) {
  if (op.rows() != rho.rows() || op.cols() != rho.cols())
    throw ValidationError("operator and state dimensions differ");
  return (op * rho).trace();
}

/// Truncated coherent state amplitudes, renormalised on the kept levels.
inline Vector coherent_amplitudes(int dim, complex alpha) {
  Vector v(dim);
  complex term = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < dim; ++n) {
    if (n > 0) term *= alpha / std::sqrt(static_cast<double>(n));
    v(n) = term;
  }
  return v / v.norm();
}

struct LiouvillianSpec {
  SystemParams params;
  bool displaced = true;
  bool include_kerr = true;
};

/// One source -> cavity chain, cross-Kerr coupled to the probe with sign kerr_sign.
struct Rail {
  std::string source;
  std::string cavity;
  double kerr_sign = 1.0;
};

inline std::vector<Rail> single_rail() { return {{"c", "a", 1.0}}; }
inline std::vector<Rail> parity_rails() { return {{"c1", "a1", 1.0}, {"c2", "a2", -1.0}}; }

// Reference building blocks, written literally.
inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline Matrix dissipator(const Matrix& l, const Matrix& rho) {
  const Matrix ldl = l.adjoint() * l;
  return l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
}

/// sqrt(gamma kappa) ([c rho, a^dag] + [a, rho c^dag]).
inline Matrix cascade_term(const Matrix& c, const Matrix& a, double gamma, double kappa,
                           const Matrix& rho) {
  return std::sqrt(gamma * kappa) *
         (commutator(c * rho, a.adjoint()) + commutator(a, rho * c.adjoint()));
}

/// Exchange Hamiltonian of the cascade: (i sqrt(gamma kappa)/2)(c^dag a - a^dag c).
inline Matrix cascade_exchange_hamiltonian(const Matrix& c, const Matrix& a, double gamma,
                                           double kappa) {
  return 0.5 * kI * std::sqrt(gamma * kappa) * (c.adjoint() * a - a.adjoint() * c);
}

/// Max entry of cascade_term - (D[sqrt(g) c + sqrt(k) a] - g D[c] - k D[a] - i[H_ex, rho]).
/// Zero (to rounding) confirms the cascade term is a Lindblad generator and so trace preserving.
inline double cascade_decomposition_residual(const Matrix& c, const Matrix& a, double gamma,
                                             double kappa, const Matrix& rho) {
  const Matrix joint = std::sqrt(gamma) * c + std::sqrt(kappa) * a;
  const Matrix h = cascade_exchange_hamiltonian(c, a, gamma, kappa);
  const Matrix rhs = dissipator(joint, rho) - gamma * dissipator(c, rho) -
                     kappa * dissipator(a, rho) - kI * commutator(h, rho);
  return (cascade_term(c, a, gamma, kappa, rho) - rhs).cwiseAbs().maxCoeff();
}

/// Generator of the cascaded master equation.
///
/// Undisplaced: H = sum_k [delta_a n_k + s_k chi n_k b^dag b] + epsilon (b + b^dag).
/// Displaced (frame shifted by beta_inf, Kerr shift of mode a compensated):
///   H = sum_k s_k chi n_k (beta_inf b^dag + beta_inf^* b + b^dag b).
/// Dissipation: gamma D[c_k] + kappa_a D[a_k] + kappa_b D[b] plus the cascade
/// coupling of every rail.
class CascadedLiouvillian {
 public:
  CascadedLiouvillian(const LiouvillianSpec& spec, const FockSpace& space,
                      std::vector<Rail> rails = single_rail(), std::string probe = "b")
      : spec_(spec), dimension_(space.dimension()) {
    validate(spec.params);
    const SystemParams& p = spec.params;
    const SparseOp& b = space.annihilation(probe);
    const SparseOp& bd = space.creation(probe);
    const SparseOp& nb = space.number(probe);
    const complex beta_inf = analytic::beta_steady(p);
    const double chi = spec.include_kerr ? p.chi : 0.0;

    SparseOp h = space.identity() * complex(0.0);
    if (!spec.displaced) h += p.epsilon * SparseOp(b + bd);
    SparseOp decay = p.kappa_b * SparseOp(bd * b);
    SparseOp exchange = space.identity() * complex(0.0);
    const double root = std::sqrt(p.gamma * p.kappa_a);
    for (const Rail& r : rails) {
      const SparseOp& c = space.annihilation(r.source);
      const SparseOp& a = space.annihilation(r.cavity);
      const SparseOp& na = space.number(r.cavity);
      if (spec.displaced) {
        const SparseOp shift = SparseOp(beta_inf * bd + std::conj(beta_inf) * b) + nb;
        h += (r.kerr_sign * chi) * SparseOp(na * shift);
      } else {
        h += p.delta_a * na + (r.kerr_sign * chi) * SparseOp(na * nb);
      }
      decay += p.gamma * SparseOp(space.creation(r.source) * c) + p.kappa_a * na;
      exchange += root * SparseOp(space.creation(r.cavity) * c);
      jumps_.push_back({std::sqrt(p.gamma) * c});
      jumps_.push_back({std::sqrt(p.kappa_a) * a});
      cross_.push_back({root * c, SparseOp(a)});
    }
    jumps_.push_back({std::sqrt(p.kappa_b) * b});
    hamiltonian_ = h;
    // d rho = K rho + rho K^dag + sum L rho L^dag + sqrt(g k)(c rho a^dag + a rho c^dag)
    drift_ = SparseOp(-kI * h - 0.5 * decay - exchange);
    drift_.makeCompressed();
  }

  std::size_t dimension() const { return dimension_; }
  const SparseOp& hamiltonian() const { return hamiltonian_; }
  const LiouvillianSpec& spec() const { return spec_; }

  /// Upper bound on the generator norm induced by the max-row-sum norm.
  double norm_bound() const {
    double bound = 2.0 * row_norm(drift_);
    for (const SparseOp& l : jumps_) bound += row_norm(l) * row_norm(SparseOp(l.adjoint()));
    for (const auto& [c, a] : cross_) bound += 2.0 * row_norm(c) * row_norm(SparseOp(a.adjoint()));
    return bound;
  }

  /// RK4 step inside the stability region and small against every decay time.
  double default_dt() const {
    const SystemParams& p = spec_.params;
    return std::min(1.5 / norm_bound(), 0.05 / std::max({p.gamma, p.kappa_a, p.kappa_b}));
  }

  /// d rho / dt for Hermitian rho.
  Matrix apply(const Matrix& rho) const {
    if (static_cast<std::size_t>(rho.rows()) != dimension_ || rho.rows() != rho.cols())
      throw ValidationError("density matrix dimension does not match the generator");
    Matrix x = drift_ * rho;
    for (const SparseOp& l : jumps_) {
      const Matrix lr = l * rho;
      x.noalias() += 0.5 * (l * lr.adjoint());
    }
    for (const auto& [c, a] : cross_) {
      const Matrix ar = a * rho;
      x.noalias() += c * ar.adjoint();
    }
    return x + x.adjoint();
  }

 private:
  static double row_norm(const SparseOp& m) {
    double best = 0.0;
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
      double sum = 0.0;
      for (SparseOp::InnerIterator it(m, r); it; ++it) sum += std::abs(it.value());
      best = std::max(best, sum);
    }
    return best;
  }

  LiouvillianSpec spec_;
  std::size_t dimension_;
  SparseOp hamiltonian_;
  SparseOp drift_;
  std::vector<SparseOp> jumps_;
  std::vector<std::pair<SparseOp, SparseOp>> cross_;
};

inline Matrix apply_liouvillian(const LiouvillianSpec& spec, const FockSpace& space,
                                const DensityMatrix& rho) {
  if (rho.dimension() != space.dimension())
    throw ValidationError("density matrix does not match the Fock space dimension");
  return CascadedLiouvillian(spec, space).apply(rho.matrix());
}

/// Largest rate in the problem; the default step is 0.01 over it.
struct Observable {
  std::string name;
  SparseOp op;
};

struct IntegrationOptions {
  bool keep_snapshots = false;
  std::size_t eigenvalue_samples = 21;  ///< grid points where the spectrum is checked
  double trace_tolerance = 1e-8;
};

struct IntegrationResult {
  double dt_used = 0.0;
  std::vector<DensityMatrix> snapshots;
  std::vector<std::string> names;
  std::vector<TimeSeries<complex>> observables;
  TimeSeries<double> trace_error;
  double max_hermiticity_defect = 0.0;
  std::vector<std::pair<double, double>> min_eigenvalues;  ///< (t, lowest eigenvalue)

  const TimeSeries<complex>& observable(std::string_view name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == name) return observables[k];
    throw ValidationError("no observable named " + std::string(name));
  }

  double min_sampled_eigenvalue() const {
    double m = 1.0;
    for (const auto& [t, e] : min_eigenvalues) m = std::min(m, e);
    return m;
  }
};

/// Classical RK4 with a fixed step. The step is shrunk so that an integer
/// number of steps spans each grid interval.
inline IntegrationResult integrate(const CascadedLiouvillian& gen, const DensityMatrix& rho0,
                                   const TimeGrid& grid, double dt,
                                   const std::vector<Observable>& observables,
                                   const IntegrationOptions& options = {}) {
  if (!(dt > 0.0)) dt = gen.default_dt();
  if (rho0.dimension() != gen.dimension())
    throw ValidationError("initial state does not match the generator");
  const double spacing = grid.spacing();
  const auto steps = static_cast<std::size_t>(std::ceil(spacing / dt - 1e-9));
  const double h = spacing / static_cast<double>(steps);

  IntegrationResult result{h, {}, {}, {}, TimeSeries<double>(grid), 0.0, {}};
  for (const Observable& o : observables) {
    result.names.push_back(o.name);
    result.observables.emplace_back(grid);
  }
  std::vector<std::size_t> eig_at;
  const std::size_t samples = std::min(options.eigenvalue_samples, grid.size());
  for (std::size_t s = 0; s < samples; ++s)
    eig_at.push_back(samples == 1 ? grid.size() - 1 : s * (grid.size() - 1) / (samples - 1));

  Matrix rho = rho0.matrix();
  std::size_t next_eig = 0;
  auto observe = [&](std::size_t k) {
    if (!rho.allFinite()) throw NumericalError("density matrix has non-finite entries");
    const double drift = std::abs(rho.trace() - 1.0);
    result.trace_error[k] = drift;
    if (drift > options.trace_tolerance)
      throw NumericalError("trace drift " + std::to_string(drift) +
                           " exceeds tolerance; reduce the time step");
    result.max_hermiticity_defect =
        std::max(result.max_hermiticity_defect, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    for (std::size_t o = 0; o < observables.size(); ++o)
      result.observables[o][k] = expect(observables[o].op, rho);
    if (next_eig < eig_at.size() && eig_at[next_eig] == k) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
      result.min_eigenvalues.emplace_back(grid[k], es.eigenvalues().minCoeff());
      while (next_eig < eig_at.size() && eig_at[next_eig] == k) ++next_eig;
    }
    if (options.keep_snapshots) {
      DensityMatrix snap = rho0;
      snap.matrix() = rho;
      result.snapshots.push_back(std::move(snap));
    }
  };

  observe(0);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    for (std::size_t s = 0; s < steps; ++s) {
      const Matrix k1 = gen.apply(rho);
      const Matrix k2 = gen.apply(rho + 0.5 * h * k1);
      const Matrix k3 = gen.apply(rho + 0.5 * h * k2);
      const Matrix k4 = gen.apply(rho + h * k3);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    observe(k);
  }
  return result;
}

inline IntegrationResult integrate(const LiouvillianSpec& spec, const FockSpace& space,
                                   const DensityMatrix& rho0, const TimeGrid& grid, double dt,
                                   const std::vector<Observable>& observables,
                                   const IntegrationOptions& options = {}) {
  return integrate(CascadedLiouvillian(spec, space), rho0, grid, dt, observables, options);
}

struct CascadeReport {
  TimeSeries<double> n_c;
  TimeSeries<double> n_a;
  TimeSeries<complex> b_d;  ///< <b> - beta_inf
  TimeSeries<double> trace_error;
  std::vector<std::pair<double, double>> min_eigenvalues;
  double max_hermiticity_defect = 0.0;
  double dt_used = 0.0;
  double top_level_population = 0.0;  ///< max over time of the top two probe levels
  bool slaved_regime = false;
  double slaved_deviation = 0.0;  ///< max|<b>_d + B <n_a>| / (B max <n_a>)
  bool slaved_within_tolerance = false;
  std::vector<std::string> warnings;
};

inline constexpr double kSlavedTolerance = 0.05;
inline constexpr double kTruncationThreshold = 1e-6;

/// Source in |1>, signal mode empty, probe at beta_inf (vacuum in the displaced frame).
inline CascadeReport run_cascade_scenario(SystemParams params, int n_b, double t_max, double dt,
                                          bool displaced, std::size_t n_points = 401) {
  validate(params);
  if (n_b < 4) throw ValidationError("N_b must be at least 4");
  if (!displaced && (params.epsilon > 0.25 * params.kappa_b || n_b < 16))
    throw ValidationError("undisplaced runs need epsilon <= 0.25 kappa_b and N_b >= 16");
  if (displaced) params.delta_a = 0.0;

  const FockSpace space = cascade_space(n_b);
  const complex beta_inf = analytic::beta_steady(params);
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(space.dimension()));
  const Vector probe = displaced ? coherent_amplitudes(n_b, 0.0) : coherent_amplitudes(n_b, beta_inf);
  for (int k = 0; k < n_b; ++k) psi(static_cast<Eigen::Index>(space.index_of({1, 0, k}))) = probe(k);
  const DensityMatrix rho0 = DensityMatrix::pure(space, psi);

  const TimeGrid grid(0.0, t_max, n_points);
  const std::vector<Observable> obs = {
      {"n_c", space.number("c")},
      {"n_a", space.number("a")},
      {"b", space.annihilation("b")},
      {"top", space.top_levels_projector("b", 2)},
  };
  const LiouvillianSpec spec{params, displaced, true};
  const IntegrationResult r = integrate(spec, space, rho0, grid, dt, obs);

  CascadeReport rep{TimeSeries<double>(grid), TimeSeries<double>(grid), TimeSeries<complex>(grid),
                    r.trace_error, r.min_eigenvalues, 0.0, 0.0, 0.0, false, 0.0, false, {}};
  rep.max_hermiticity_defect = r.max_hermiticity_defect;
  rep.dt_used = r.dt_used;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    rep.n_c[k] = r.observable("n_c")[k].real();
    rep.n_a[k] = r.observable("n_a")[k].real();
    rep.b_d[k] = r.observable("b")[k] - (displaced ? complex{} : beta_inf);
    rep.top_level_population = std::max(rep.top_level_population, r.observable("top")[k].real());
  }
  if (rep.top_level_population > kTruncationThreshold)
    rep.warnings.push_back("probe truncation: top two Fock levels hold population " +
                           std::to_string(rep.top_level_population) + "; increase N_b");

  const double b_scale = params.displacement_scale();
  rep.slaved_regime = displaced && params.kappa_b >= 10.0 * params.kappa_a &&
                      std::abs(params.chi) <= 0.01 * params.kappa_b;
  double peak = 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    peak = std::max(peak, rep.n_a[k]);
    worst = std::max(worst, std::abs(rep.b_d[k] + b_scale * rep.n_a[k]));
  }
  if (b_scale != 0.0 && peak > 0.0) rep.slaved_deviation = worst / (std::abs(b_scale) * peak);
  rep.slaved_within_tolerance = rep.slaved_deviation <= kSlavedTolerance;
  if (rep.slaved_regime && !rep.slaved_within_tolerance)
    rep.warnings.push_back("slaved approximation off by " + std::to_string(100.0 * rep.slaved_deviation) +
                           "% of the peak displacement (tolerance 5%)");
  return rep;
}

}  // namespace kerrsim::lindblad
