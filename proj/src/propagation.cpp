// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

#include "kickrot/propagation.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>

#include "kickrot/error.hpp"
#include "kickrot/export.hpp"

namespace kickrot {

namespace {

// Half-width of the stepped pulse window in units of the Gaussian sigma.
// The envelope mass outside +-6 sigma is 2e-9 of the total.
constexpr double kPulseWindowSigmas = 6.0;
constexpr double kStepsPerFwhm = 64.0;
constexpr double kMaxPhaseStep = 0.1;

double fwhm_to_sigma(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

std::string describe(const BasisSpec& basis) {
  std::ostringstream os;
  os << "M=" << basis.m() << ", " << to_string(basis.parity()) << ", J=" << basis.j_min() << ".."
     << basis.j_max();
  return os.str();
}

double window_population(const Eigen::VectorXcd& c, const BasisSpec& basis, bool top) {
  double sum = 0.0;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const int j = basis.j_at(i);
    const bool inside = top ? j > basis.j_max() - kEdgeWindowJ : j < basis.j_min() + kEdgeWindowJ;
    if (inside) sum += std::norm(c[static_cast<Eigen::Index>(i)]);
  }
  return sum;
}

}  // namespace

TruncationError::TruncationError(int cycle, double top_population, int j_max)
    : NumericalError("truncation guard: population " + format_real(top_population) +
                     " within 40 J units of J_max = " + std::to_string(j_max) + " after cycle " +
                     std::to_string(cycle) + "; enlarge J_max"),
      cycle_(cycle),
      top_population_(top_population) {}

WaveFunction::WaveFunction(BasisSpec basis, Eigen::VectorXcd coeffs, double time)
    : basis_(basis), coeffs_(std::move(coeffs)), time_(time) {
  if (static_cast<std::size_t>(coeffs_.size()) != basis_.dimension()) {
    throw std::invalid_argument("WaveFunction: coefficient count does not match the basis (" +
                                describe(basis_) + ")");
  }
}

WaveFunction WaveFunction::basis_state(const BasisSpec& basis, int j) {
  const auto idx = basis.index_of(j);
  if (!idx) {
    throw ConfigError("J0", "J = " + std::to_string(j) + " is not on the grid " + describe(basis));
  }
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dimension()));
  c[static_cast<Eigen::Index>(*idx)] = 1.0;
  return {basis, std::move(c)};
}

double WaveFunction::top_window_population() const { return window_population(coeffs_, basis_, true); }

double WaveFunction::bottom_window_population() const {
  return window_population(coeffs_, basis_, false);
}

double WaveFunction::fidelity(const WaveFunction& other) const {
  if (!(other.basis_ == basis_)) throw std::invalid_argument("fidelity: different grids");
  return std::norm(coeffs_.dot(other.coeffs_));
}

std::string to_string(PulseShape shape) { return shape == PulseShape::delta ? "delta" : "gaussian"; }

void PulseTrainSpec::validate() const {
  if (!(kick_strength >= 0.0) || !std::isfinite(kick_strength)) {
    throw ConfigError("P", "kick strength must be finite and >= 0");
  }
  if (pulses < 1) throw ConfigError("N", "pulse count must be >= 1");
  if (shape == PulseShape::gaussian) {
    if (!(fwhm > 0.0)) throw ConfigError("fwhm", "Gaussian pulses need a positive FWHM");
    const double half_window = kPulseWindowSigmas * fwhm_to_sigma(fwhm);
    if (half_window > 0.5 * period()) {
      throw ConfigError("fwhm", "pulse (FWHM " + std::to_string(fwhm) +
                                    ") does not fit inside one period of " + std::to_string(period()));
    }
  }
}

KickPropagator::KickPropagator(const CouplingMatrix& coupling) : basis_(coupling.basis()) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(coupling.diagonal(), coupling.off_diagonal(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("kick operator: eigendecomposition of cos^2 matrix did not converge (" +
                         describe(basis_) + ")");
  }
  lambda_ = solver.eigenvalues();
  v_ = solver.eigenvectors();
}

Eigen::MatrixXcd KickPropagator::matrix(double strength) const {
  const auto n = lambda_.size();
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a.col(k) = v_.col(k).cast<std::complex<double>>() *
               std::polar(1.0, strength * (lambda_[k] - kIsotropicPart));
  }
  return a * v_.transpose().cast<std::complex<double>>();
}

Eigen::VectorXcd KickPropagator::apply(double strength, const Eigen::VectorXcd& psi) const {
  Eigen::VectorXcd y = v_.transpose() * psi;
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    y[k] *= std::polar(1.0, strength * (lambda_[k] - kIsotropicPart));
  }
  return v_ * y;
}

Eigen::MatrixXcd kick_operator(double strength, const CouplingMatrix& coupling) {
  return KickPropagator(coupling).matrix(strength);
}

OneCycleOperator::OneCycleOperator(Eigen::MatrixXcd u, BasisSpec basis, PulseTrainSpec train,
                                   RotorSpectrum spectrum)
    : u_(std::move(u)), basis_(basis), train_(train), spectrum_(spectrum) {
  const auto n = static_cast<Eigen::Index>(basis_.dimension());
  if (u_.rows() != n || u_.cols() != n) {
    throw std::invalid_argument("OneCycleOperator: matrix size does not match the basis");
  }
}

double OneCycleOperator::interior_unitarity_residual() const {
  const Eigen::MatrixXcd g = u_.adjoint() * u_;
  double worst = 0.0;
  for (std::size_t i = 0; i < basis_.dimension(); ++i) {
    if (basis_.j_at(i) > basis_.j_max() - kEdgeWindowJ) break;
    Eigen::VectorXcd col = g.col(static_cast<Eigen::Index>(i));
    col[static_cast<Eigen::Index>(i)] -= 1.0;
    worst = std::max(worst, col.norm());
  }
  return worst;
}

WaveFunction OneCycleOperator::apply(const WaveFunction& psi) const {
  if (!(psi.basis() == basis_)) throw std::invalid_argument("OneCycleOperator::apply: grid mismatch");
  return {basis_, u_ * psi.coeffs(), psi.time() + train_.period()};
}

OneCycleOperator one_cycle_operator(const PulseTrainSpec& train, const KickPropagator& kick,
                                    const RotorSpectrum& spectrum) {
  train.validate();
  if (train.shape != PulseShape::delta) {
    throw ConfigError("shape", "one_cycle_operator handles delta kicks; use finite_pulse_cycle_operator");
  }
  const BasisSpec& basis = kick.basis();
  const Eigen::VectorXcd half =
      spectrum.free_phases(basis, train.tau_fraction.num(), 2 * train.tau_fraction.den());
  Eigen::MatrixXcd u = kick.matrix(train.kick_strength);
  u = half.asDiagonal() * u * half.asDiagonal();
  return {std::move(u), basis, train, spectrum};
}

OneCycleOperator one_cycle_operator(const PulseTrainSpec& train, const BasisSpec& basis,
                                    const RotorSpectrum& spectrum) {
  return one_cycle_operator(train, KickPropagator(cos2_matrix(basis)), spectrum);
}

void check_truncation(const WaveFunction& psi, int cycle) {
  const double top = psi.top_window_population();
  if (top > kTruncationThreshold) throw TruncationError(cycle, top, psi.basis().j_max());
}

std::vector<WaveFunction> propagate_train(const WaveFunction& psi0, const OneCycleOperator& u,
                                          int pulses) {
  if (pulses < 1) throw ConfigError("N", "pulse count must be >= 1");
  std::vector<WaveFunction> out;
  out.reserve(static_cast<std::size_t>(pulses) + 1);
  check_truncation(psi0, 0);
  out.push_back(psi0);
  for (int n = 1; n <= pulses; ++n) {
    out.push_back(u.apply(out.back()));
    check_truncation(out.back(), n);
  }
  return out;
}

std::vector<WaveFunction> propagate_train(const WaveFunction& psi0, const PulseTrainSpec& train,
                                          const RotorSpectrum& spectrum) {
  train.validate();
  const BasisSpec& basis = psi0.basis();
  std::vector<WaveFunction> out;
  out.reserve(static_cast<std::size_t>(train.pulses) + 1);
  check_truncation(psi0, 0);
  out.push_back(psi0);

  if (train.shape == PulseShape::gaussian) {
    const double dt = default_pulse_step(train, basis, spectrum);
    for (int n = 1; n <= train.pulses; ++n) {
      out.push_back(finite_pulse_cycle(out.back(), train, spectrum, dt));
      check_truncation(out.back(), n);
    }
    return out;
  }

  const KickPropagator kick(cos2_matrix(basis));
  const Eigen::VectorXcd half =
      spectrum.free_phases(basis, train.tau_fraction.num(), 2 * train.tau_fraction.den());
  for (int n = 1; n <= train.pulses; ++n) {
    Eigen::VectorXcd c = half.cwiseProduct(out.back().coeffs());
    c = kick.apply(train.kick_strength, c);
    c = half.cwiseProduct(c);
    out.emplace_back(basis, std::move(c), out.back().time() + train.period());
    check_truncation(out.back(), n);
  }
  return out;
}

double default_pulse_step(const PulseTrainSpec& train, const BasisSpec& basis,
                          const RotorSpectrum& spectrum) {
  const double e_max = std::abs(spectrum.energy(basis.j_max()));
  double dt = train.fwhm / kStepsPerFwhm;
  if (e_max > 0.0) dt = std::min(dt, 0.99 * kMaxPhaseStep / e_max);
  return dt;
}

PulseSteps gaussian_pulse_steps(const PulseTrainSpec& train, double dt) {
  train.validate();
  if (train.shape != PulseShape::gaussian) throw ConfigError("shape", "expected a Gaussian train");
  if (!(dt > 0.0)) throw ConfigError("dt", "time step must be positive");
  if (dt > train.fwhm / kStepsPerFwhm) {
    throw ConfigError("dt", "time step " + std::to_string(dt) + " gives fewer than 64 steps per FWHM");
  }
  const double sigma = fwhm_to_sigma(train.fwhm);
  const double half_window = kPulseWindowSigmas * sigma;
  const auto steps = static_cast<std::size_t>(std::ceil(2.0 * half_window / dt));
  PulseSteps out;
  out.dt = 2.0 * half_window / static_cast<double>(steps);
  out.window_start = 0.5 * train.period() - half_window;
  out.increments.resize(steps);
  const double norm = train.kick_strength / (sigma * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = -half_window + (static_cast<double>(k) + 0.5) * out.dt;
    out.increments[k] = norm * std::exp(-0.5 * t * t / (sigma * sigma)) * out.dt;
  }
  return out;
}

namespace {

struct SplitStepper {
  PulseSteps steps;
  Eigen::VectorXcd edge_phases;   // free evolution from 0 to the first half step, and mirror
  Eigen::MatrixXcd step_in_eigen;  // V^T exp(-i E dt) V
  const KickPropagator* kick;
};

SplitStepper make_stepper(const PulseTrainSpec& train, const KickPropagator& kick,
                          const RotorSpectrum& spectrum, double dt) {
  const BasisSpec& basis = kick.basis();
  const double e_max = std::abs(spectrum.energy(basis.j_max()));
  if (dt * e_max >= kMaxPhaseStep) {
    throw ConfigError("dt", "time step " + std::to_string(dt) + " too coarse for E(J_max) = " +
                                std::to_string(e_max) + " (need dt*E < 0.1)");
  }
  SplitStepper s{gaussian_pulse_steps(train, dt), {}, {}, &kick};
  s.edge_phases = spectrum.free_phases(basis, s.steps.window_start + 0.5 * s.steps.dt);
  const Eigen::VectorXcd step = spectrum.free_phases(basis, s.steps.dt);
  const Eigen::MatrixXcd v = kick.eigenvectors().cast<std::complex<double>>();
  s.step_in_eigen = v.transpose() * step.asDiagonal() * v;
  return s;
}

// Runs the stepped window on the columns of `x`, which enter and leave in the J basis.
template <typename Block>
Eigen::MatrixXcd run_window(const SplitStepper& s, const Block& x) {
  const Eigen::MatrixXd& v = s.kick->eigenvectors();
  const Eigen::VectorXd& lambda = s.kick->eigenvalues();
  Eigen::MatrixXcd y = v.transpose() * (s.edge_phases.asDiagonal() * x);
  Eigen::MatrixXcd tmp(y.rows(), y.cols());
  Eigen::VectorXcd kick_phases(lambda.size());
  const std::size_t n = s.steps.increments.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double pk = s.steps.increments[k];
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      kick_phases[i] = std::polar(1.0, pk * (lambda[i] - kIsotropicPart));
    }
    y = kick_phases.asDiagonal() * y;
    if (k + 1 < n) {
      tmp.noalias() = s.step_in_eigen * y;
      y.swap(tmp);
    }
  }
  return s.edge_phases.asDiagonal() * (v * y);
}

}  // namespace

WaveFunction finite_pulse_cycle(const WaveFunction& psi, const PulseTrainSpec& train,
                                const RotorSpectrum& spectrum, double dt) {
  const KickPropagator kick(cos2_matrix(psi.basis()));
  const SplitStepper s = make_stepper(train, kick, spectrum, dt);
  Eigen::MatrixXcd out = run_window(s, psi.coeffs());
  return {psi.basis(), out.col(0), psi.time() + train.period()};
}

OneCycleOperator finite_pulse_cycle_operator(const PulseTrainSpec& train, const BasisSpec& basis,
                                             const RotorSpectrum& spectrum, double dt) {
  const KickPropagator kick(cos2_matrix(basis));
  const SplitStepper s = make_stepper(train, kick, spectrum, dt);
  const auto n = static_cast<Eigen::Index>(basis.dimension());
  Eigen::MatrixXcd u = run_window(s, Eigen::MatrixXcd::Identity(n, n));
  return {std::move(u), basis, train, spectrum};
}

double kick_strength_from_pulse(const UnitBridge& bridge, double peak_intensity_w_cm2, double fwhm_s) {
  if (!bridge.polarizability_anisotropy_A3()) {
    throw ConfigError("delta_alpha_A3", "polarizability anisotropy is required to convert pulses to P");
  }
  if (!(peak_intensity_w_cm2 >= 0.0)) throw ConfigError("peak_intensity", "must be >= 0");
  if (!(fwhm_s > 0.0)) throw ConfigError("fwhm", "pulse duration must be positive");
  const double intensity = peak_intensity_w_cm2 * 1e4;                  // W/m^2
  const double delta_alpha = *bridge.polarizability_anisotropy_A3() * 1e-30;  // m^3
  // Delta alpha (SI) = 4 pi eps0 * Delta alpha (volume); E0^2 = 2 I / (c eps0).
  const double fluence_integral = fwhm_s * std::sqrt(std::numbers::pi / (4.0 * std::log(2.0)));
  return 2.0 * std::numbers::pi * delta_alpha * intensity * fluence_integral /
         (constants::hbar * constants::speed_of_light);
}

}  // namespace kickrot
