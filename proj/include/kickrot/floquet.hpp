// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file floquet.hpp
 * @brief Quasienergy (Floquet) states of the one-cycle operator.
 *
 * A quasienergy state v satisfies U v = exp(-i omega) v with omega taken in
 * [-pi, pi). States are classified by their weight near the two grid edges:
 *
 *   edge      lower-window weight > 0.1 and upper-window weight < 1e-6
 *   artifact  upper-window weight > 0.1 (localized at the artificial J_max)
 *   extended  everything else
 *
 * Each window spans 40 units of J (20 grid sites of one parity).
 */

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kickrot/basis.hpp"
#include "kickrot/propagation.hpp"

namespace kickrot {

enum class StateClass { extended, edge, artifact };

[[nodiscard]] std::string to_string(StateClass c);

inline constexpr double kEdgeLowerThreshold = 0.1;
inline constexpr double kEdgeUpperThreshold = 1e-6;
inline constexpr double kArtifactThreshold = 0.1;
inline constexpr double kDegeneracyThreshold = 1e-10;

struct QuasienergyState {
  double omega = 0.0;
  Eigen::VectorXcd vector;
  StateClass cls = StateClass::extended;
  double lower_weight = 0.0;
  double upper_weight = 0.0;
};

class QuasienergySet {
 public:
  QuasienergySet(std::vector<QuasienergyState> entries, BasisSpec basis, PulseTrainSpec train,
                 RotorSpectrum spectrum, bool classified = false);

  [[nodiscard]] const std::vector<QuasienergyState>& entries() const noexcept { return entries_; }
  [[nodiscard]] std::vector<QuasienergyState>& entries() noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] const QuasienergyState& operator[](std::size_t i) const { return entries_[i]; }

  [[nodiscard]] const BasisSpec& basis() const noexcept { return basis_; }
  [[nodiscard]] const PulseTrainSpec& train() const noexcept { return train_; }
  [[nodiscard]] const RotorSpectrum& spectrum() const noexcept { return spectrum_; }
  [[nodiscard]] bool classified() const noexcept { return classified_; }
  void mark_classified() noexcept { classified_ = true; }

  [[nodiscard]] std::size_t count(StateClass c) const;
  [[nodiscard]] std::vector<double> omegas(std::optional<StateClass> only = std::nullopt) const;

 private:
  std::vector<QuasienergyState> entries_;
  BasisSpec basis_;
  PulseTrainSpec train_;
  RotorSpectrum spectrum_;
  bool classified_;
};

/// Maps any angle onto [-pi, pi).
[[nodiscard]] double wrap_quasienergy(double omega);

/**
 * Full eigendecomposition of U via a complex Schur form (U is normal, so the
 * Schur vectors are orthonormal eigenvectors). Entries are sorted by omega;
 * near-degenerate clusters are re-orthonormalized. Throws NumericalError when
 * an eigenvector residual exceeds 1e-8.
 */
[[nodiscard]] QuasienergySet quasienergy_decomposition(const OneCycleOperator& u);

/// Fills in class and window weights; rejects grids whose two windows overlap.
[[nodiscard]] QuasienergySet classify_edge_states(QuasienergySet set);

struct OverlapContribution {
  std::size_t state_index = 0;
  double omega = 0.0;
  double weight = 0.0;
};

struct OverlapReport {
  int j0 = 0;  ///< Dominant J of the initial state.
  int m = 0;
  double kick_strength = 0.0;
  double overlap = 0.0;
  std::vector<OverlapContribution> contributions;
};

/// O = sum over edge states of |<v|psi0>|^2.
[[nodiscard]] OverlapReport edge_overlap(const WaveFunction& psi0, const QuasienergySet& set);

/// psi(N tau) = sum_a <v_a|psi0> exp(-i omega_a N) v_a.
[[nodiscard]] WaveFunction reconstruct_from_quasienergies(const WaveFunction& psi0,
                                                          const QuasienergySet& set, int cycles);

/// Maximal runs of quasienergies (on the circle) separated by gaps below `max_gap`.
struct Band {
  double lower = 0.0;  ///< First member; may exceed `upper` for a band that wraps through -pi.
  double upper = 0.0;
  double width = 0.0;
  std::size_t count = 0;
};

[[nodiscard]] std::vector<Band> find_bands(std::vector<double> omegas, double max_gap);

/// Largest gap inside a band: 1e-4 of the full quasienergy circle.
inline constexpr double kBandGap = 1e-4 * 2.0 * std::numbers::pi;

/// Bands of the non-artifact spectrum holding at least two states.
[[nodiscard]] std::vector<Band> spectral_bands(const QuasienergySet& set, double max_gap = kBandGap);

/**
 * An edge state standing apart from the continuum: its distance to the
 * nearest extended quasienergy exceeds the mean level spacing 2 pi / dim.
 */
struct DiscreteLevel {
  std::size_t state_index = 0;
  double omega = 0.0;
  double gap = 0.0;  ///< Distance to the nearest extended quasienergy.
};

[[nodiscard]] std::vector<DiscreteLevel> discrete_edge_levels(const QuasienergySet& set);

struct ScanLevel {
  double omega = 0.0;
  StateClass cls = StateClass::extended;
  double lower_weight = 0.0;
};

struct ScanPoint {
  double kick_strength = 0.0;
  std::vector<ScanLevel> levels;
  std::optional<std::string> error;
};

/// Counts of non-artifact states per (P point, omega bin) over [-pi, pi).
struct DensityHistogram {
  std::size_t omega_bins = 0;
  std::vector<double> kick_strengths;
  std::vector<std::vector<int>> counts;  ///< counts[p][bin]

  [[nodiscard]] double bin_center(std::size_t bin) const;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  DensityHistogram histogram;
};

struct ScanOptions {
  std::size_t omega_bins = 256;
  unsigned threads = 1;
};

/**
 * Quasienergies and classes for each kick strength of an ascending grid.
 * Failures at individual points are recorded in ScanPoint::error; the scan
 * continues.
 */
[[nodiscard]] ScanResult spectrum_scan(std::span<const double> kick_strengths, Rational tau_fraction,
                                       const BasisSpec& basis, const RotorSpectrum& spectrum,
                                       const ScanOptions& options = {});

/// One-cycle matrix of the planar rotor (E_J = J^2/2, t_rev = 4 pi, kick exp(i P cos phi)).
[[nodiscard]] Eigen::MatrixXcd planar_one_cycle_matrix(double kick_strength, Rational tau_fraction,
                                                       int grid_size);

/// Sorted quasienergies of the planar kicked rotor on J in [-grid_size, grid_size].
[[nodiscard]] std::vector<double> planar_reference_spectrum(double kick_strength,
                                                            Rational tau_fraction, int grid_size);

/// Eigenvalues (unsorted) and eigenvectors of a normal matrix via complex Schur.
struct NormalEigensystem {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
};
[[nodiscard]] NormalEigensystem normal_eigensystem(const Eigen::MatrixXcd& u);

}  // namespace kickrot
