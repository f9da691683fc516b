// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file propagation.hpp
 * @brief Kick and free-evolution propagators, the one-cycle operator and
 *        trajectories through delta-kick and Gaussian pulse trains.
 *
 * Kicks act at the middle of each period: a cycle is free evolution for
 * tau/2, the kick, then free evolution for tau/2. The kick is
 * exp(i P (cos^2 theta - 1/3)); the isotropic part exp(i P / 3) is a global
 * phase and is left out, which centres the quasienergy bands at P-independent
 * positions.
 * Wave functions hold Schroedinger-picture amplitudes at their time stamp.
 */

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "kickrot/basis.hpp"
#include "kickrot/coupling.hpp"

namespace kickrot {

/// Number of J units at each grid edge used by the edge-state windows and the truncation guard.
inline constexpr int kEdgeWindowJ = 40;
/// Largest population tolerated in the top window during trusted propagation.
inline constexpr double kTruncationThreshold = 1e-8;
/// Isotropic average of cos^2 theta, removed from the kick as a global phase.
inline constexpr double kIsotropicPart = 1.0 / 3.0;

class WaveFunction {
 public:
  WaveFunction(BasisSpec basis, Eigen::VectorXcd coeffs, double time = 0.0);

  /// |J,M> on the given grid.
  static WaveFunction basis_state(const BasisSpec& basis, int j);

  [[nodiscard]] const BasisSpec& basis() const noexcept { return basis_; }
  [[nodiscard]] const Eigen::VectorXcd& coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] double time() const noexcept { return time_; }

  [[nodiscard]] double norm() const { return coeffs_.norm(); }
  /// Population in J in [J_max - 39, J_max].
  [[nodiscard]] double top_window_population() const;
  /// Population in J in [J_min, J_min + 39].
  [[nodiscard]] double bottom_window_population() const;
  /// |<this|other>|^2.
  [[nodiscard]] double fidelity(const WaveFunction& other) const;

 private:
  BasisSpec basis_;
  Eigen::VectorXcd coeffs_;
  double time_;
};

enum class PulseShape { delta, gaussian };

[[nodiscard]] std::string to_string(PulseShape shape);

/**
 * A periodic train of N pulses with period tau = (p/q) t_rev.
 *
 * `kick_strength` is the integrated strength P for either shape; for a
 * Gaussian train `fwhm` is the full width at half maximum of the intensity
 * envelope in reduced time.
 */
struct PulseTrainSpec {
  double kick_strength = 0.0;
  Rational tau_fraction{1, 1};
  int pulses = 1;
  PulseShape shape = PulseShape::delta;
  double fwhm = 0.0;

  [[nodiscard]] double period() const noexcept { return kRevivalTime * tau_fraction.value(); }
  void validate() const;
};

/**
 * Eigendecomposition C = V diag(lambda) V^T of the coupling matrix.
 *
 * Built once per grid; kicks of any strength follow from it without
 * another decomposition.
 */
class KickPropagator {
 public:
  explicit KickPropagator(const CouplingMatrix& coupling);

  [[nodiscard]] const BasisSpec& basis() const noexcept { return basis_; }
  [[nodiscard]] const Eigen::VectorXd& eigenvalues() const noexcept { return lambda_; }
  [[nodiscard]] const Eigen::MatrixXd& eigenvectors() const noexcept { return v_; }

  /// Dense exp(i P (cos^2 theta - 1/3)).
  [[nodiscard]] Eigen::MatrixXcd matrix(double strength) const;
  [[nodiscard]] Eigen::VectorXcd apply(double strength, const Eigen::VectorXcd& psi) const;

 private:
  BasisSpec basis_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd v_;
};

[[nodiscard]] Eigen::MatrixXcd kick_operator(double strength, const CouplingMatrix& coupling);

/// Dense one-period propagator on a fixed grid, with the parameters it was built from.
class OneCycleOperator {
 public:
  OneCycleOperator(Eigen::MatrixXcd u, BasisSpec basis, PulseTrainSpec train, RotorSpectrum spectrum);

  [[nodiscard]] const Eigen::MatrixXcd& matrix() const noexcept { return u_; }
  [[nodiscard]] const BasisSpec& basis() const noexcept { return basis_; }
  [[nodiscard]] const PulseTrainSpec& train() const noexcept { return train_; }
  [[nodiscard]] const RotorSpectrum& spectrum() const noexcept { return spectrum_; }

  /// max over columns with J <= J_max - 40 of ||(U^dagger U - I) e_J||.
  [[nodiscard]] double interior_unitarity_residual() const;

  [[nodiscard]] WaveFunction apply(const WaveFunction& psi) const;

 private:
  Eigen::MatrixXcd u_;
  BasisSpec basis_;
  PulseTrainSpec train_;
  RotorSpectrum spectrum_;
};

/// U = D K D with D = exp(-i E_J tau/2); delta trains only.
[[nodiscard]] OneCycleOperator one_cycle_operator(const PulseTrainSpec& train, const BasisSpec& basis,
                                                  const RotorSpectrum& spectrum);
[[nodiscard]] OneCycleOperator one_cycle_operator(const PulseTrainSpec& train,
                                                  const KickPropagator& kick,
                                                  const RotorSpectrum& spectrum);

/**
 * Snapshots psi(0), psi(tau), ..., psi(N tau).
 *
 * Throws TruncationError as soon as a snapshot has more than
 * kTruncationThreshold population in the top window.
 */
[[nodiscard]] std::vector<WaveFunction> propagate_train(const WaveFunction& psi0,
                                                        const PulseTrainSpec& train,
                                                        const RotorSpectrum& spectrum);
[[nodiscard]] std::vector<WaveFunction> propagate_train(const WaveFunction& psi0,
                                                        const OneCycleOperator& u, int pulses);

/// Throws TruncationError(cycle, ...) if psi leaks into the top window.
void check_truncation(const WaveFunction& psi, int cycle);

/// Default finite-pulse step: 64 steps per FWHM, or the phase limit if tighter.
[[nodiscard]] double default_pulse_step(const PulseTrainSpec& train, const BasisSpec& basis,
                                        const RotorSpectrum& spectrum);

/// Kick increments P_k = envelope(t_k) dt at the step midpoints, plus the window start.
struct PulseSteps {
  double window_start = 0.0;
  double dt = 0.0;
  std::vector<double> increments;
};

/// Midpoint discretization of the Gaussian envelope centred at tau/2.
[[nodiscard]] PulseSteps gaussian_pulse_steps(const PulseTrainSpec& train, double dt);

/**
 * One period of a Gaussian train by first-order split steps: half-step free
 * phases, kick increment exp(i P_k (cos^2 - 1/3)), half-step free phases.
 *
 * Outside the pulse window the envelope is below 1e-8 of its integral and the
 * evolution is free. Rejects dt that resolves the envelope with fewer than 64
 * steps per FWHM or has dt * E_Jmax >= 0.1.
 */
[[nodiscard]] WaveFunction finite_pulse_cycle(const WaveFunction& psi, const PulseTrainSpec& train,
                                              const RotorSpectrum& spectrum, double dt);

/// Dense propagator of one Gaussian-pulse period (same scheme as finite_pulse_cycle).
[[nodiscard]] OneCycleOperator finite_pulse_cycle_operator(const PulseTrainSpec& train,
                                                           const BasisSpec& basis,
                                                           const RotorSpectrum& spectrum, double dt);

/**
 * P = (Delta alpha / 4 hbar) * integral of E^2(t) dt for a Gaussian intensity
 * envelope with the given peak intensity (W/cm^2) and FWHM (s).
 */
[[nodiscard]] double kick_strength_from_pulse(const UnitBridge& bridge, double peak_intensity_w_cm2,
                                              double fwhm_s);

}  // namespace kickrot
