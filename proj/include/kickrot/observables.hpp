// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file observables.hpp
 * @brief Populations, energy, alignment, thermal ensembles and the Fourier
 *        spectrum of the alignment signal.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kickrot/basis.hpp"
#include "kickrot/coupling.hpp"
#include "kickrot/propagation.hpp"

namespace kickrot {

/// |C_J|^2 in grid order.
[[nodiscard]] std::vector<double> populations(const WaveFunction& psi);

/// Sum of E_J |C_J|^2.
[[nodiscard]] double rotational_energy(const WaveFunction& psi, const RotorSpectrum& spectrum);

/// <psi|cos^2 theta|psi>.
[[nodiscard]] double alignment_expectation(const WaveFunction& psi, const CouplingMatrix& coupling);

/// Population-weighted mean J.
[[nodiscard]] double mean_j(const WaveFunction& psi);

/// Uniformly sampled <cos^2 theta>(t) under free evolution.
struct AlignmentTrace {
  double start_time = 0.0;  ///< Reduced time of the first sample.
  double dt = 0.0;
  std::vector<double> values;
  int pulses = 0;  ///< Pulses applied before sampling started.

  [[nodiscard]] double window() const noexcept {
    return values.empty() ? 0.0 : dt * static_cast<double>(values.size() - 1);
  }
  [[nodiscard]] double time_at(std::size_t i) const noexcept {
    return start_time + dt * static_cast<double>(i);
  }
};

/// Populations below this are ignored when looking for the highest beat frequency.
inline constexpr double kBeatPopulationFloor = 1e-12;

/// Highest beat frequency E_{J+2} - E_J (reduced angular units) among populated pairs.
[[nodiscard]] double highest_beat_frequency(const WaveFunction& psi, const RotorSpectrum& spectrum);

/// Smallest sample count that resolves every beat of psi over `window` at the Nyquist rate.
[[nodiscard]] std::size_t nyquist_samples(const WaveFunction& psi, const RotorSpectrum& spectrum,
                                          double window);

/**
 * Samples alignment_expectation of the freely evolving psi at
 * t = psi.time() + k * window / (samples - 1). Rejects sample counts below
 * the Nyquist requirement, naming the required count.
 */
[[nodiscard]] AlignmentTrace alignment_trace(const WaveFunction& psi, const RotorSpectrum& spectrum,
                                             const CouplingMatrix& coupling, double window,
                                             std::size_t samples, int pulses = 0);

struct AlignmentSpectrum {
  std::vector<double> frequencies;  ///< Reduced angular frequency, or cm^-1 with a bridge.
  std::vector<double> magnitudes;
  std::string unit;
};

struct SpectrumOptions {
  std::size_t zero_padding = 8;
  std::optional<UnitBridge> bridge;
};

/**
 * Magnitude spectrum of a trace: mean removed, Gaussian window centred on the
 * trace whose transform has FWHM `broadening` (reduced angular frequency),
 * zero padding, real FFT. Magnitudes are scaled so that their squares sum to
 * the squared norm of the windowed signal.
 *
 * Rejects broadening below 4 pi / window (line narrower than twice the
 * frequency resolution).
 */
[[nodiscard]] AlignmentSpectrum alignment_spectrum(const AlignmentTrace& trace, double broadening,
                                                   const SpectrumOptions& options = {});

/// Magnitude-squared weighted mean frequency of two groups split at `split`.
struct GroupCentroids {
  double low = 0.0;
  double high = 0.0;
  double low_weight = 0.0;
  double high_weight = 0.0;
};

[[nodiscard]] GroupCentroids group_centroids(const AlignmentSpectrum& spectrum, double split);

/// Boltzmann constant in cm^-1 per kelvin.
inline constexpr double kBoltzmannCm =
    constants::boltzmann / (constants::planck * constants::speed_of_light_cm);

/// Members whose Boltzmann weight falls below this fraction of the total are dropped.
inline constexpr double kThermalCutoff = 1e-6;

struct EnsembleMember {
  int j0 = 0;
  int m = 0;
  double weight = 0.0;

  [[nodiscard]] Parity parity() const noexcept { return j0 % 2 == 0 ? Parity::even : Parity::odd; }
};

class ThermalEnsemble {
 public:
  ThermalEnsemble(std::vector<EnsembleMember> members, double temperature_k);

  [[nodiscard]] const std::vector<EnsembleMember>& members() const noexcept { return members_; }
  [[nodiscard]] double temperature() const noexcept { return temperature_; }
  [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
  [[nodiscard]] int max_j0() const;
  [[nodiscard]] int max_abs_m() const;

 private:
  std::vector<EnsembleMember> members_;
  double temperature_;
};

/**
 * Boltzmann ensemble of |J0,M> states, ordered by J0 then M. T = 0 gives the
 * single member |0,0>. No nuclear-spin statistics.
 */
[[nodiscard]] ThermalEnsemble thermal_ensemble(double temperature_k, const UnitBridge& bridge,
                                               const RotorSpectrum& spectrum);

/// One member's populations per snapshot, on its own grid.
struct PopulationSeries {
  BasisSpec basis;
  std::vector<std::vector<double>> snapshots;
};

/// Weighted average of per-member scalar sequences (same length, member order).
[[nodiscard]] std::vector<double> ensemble_average(const ThermalEnsemble& ensemble,
                                                   std::span<const std::vector<double>> per_member);

/**
 * Weighted average of per-member populations merged on the axis J = 0..J_top,
 * [snapshot][J]. All members need the same snapshot count and the same J_max
 * up to parity.
 */
[[nodiscard]] std::vector<std::vector<double>> ensemble_average(
    const ThermalEnsemble& ensemble, std::span<const PopulationSeries> per_member);

/// Snapshots psi(0..N tau) of every member, in member order.
struct EnsembleTrajectories {
  std::vector<std::vector<WaveFunction>> members;
};

/**
 * Propagates every member through the train on the grid J <= j_max. One
 * cycle operator is built per (|M|, parity) block; blocks run on up to
 * `threads` threads.
 */
[[nodiscard]] EnsembleTrajectories propagate_ensemble(const ThermalEnsemble& ensemble, int j_max,
                                                      const PulseTrainSpec& train,
                                                      const RotorSpectrum& spectrum,
                                                      unsigned threads = 1);

/// Merged populations [snapshot][J] of an ensemble run.
[[nodiscard]] std::vector<std::vector<double>> ensemble_populations(
    const ThermalEnsemble& ensemble, const EnsembleTrajectories& run);

/// Least-squares fit of log y = log c + k log x.
struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
};

[[nodiscard]] PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

/// c minimizing sum (y - c x^2)^2.
[[nodiscard]] double quadratic_prefactor(std::span<const double> x, std::span<const double> y);

}  // namespace kickrot
