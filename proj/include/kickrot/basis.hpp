// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file basis.hpp
 * @brief Truncated |J,M> basis, rotor energy levels and SI unit conversions.
 *
 * Reduced units throughout: energy in hbar^2/I, time in I/hbar. In these
 * units the rigid-rotor levels are E_J = J(J+1)/2 and the revival time is 2*pi.
 */

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace kickrot {

namespace constants {
inline constexpr double speed_of_light = 2.99792458e8;        // m/s
inline constexpr double speed_of_light_cm = 2.99792458e10;    // cm/s
inline constexpr double planck = 6.62607015e-34;              // J s
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);
inline constexpr double boltzmann = 1.380649e-23;             // J/K
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
}  // namespace constants

/// Revival time of the rigid 3D rotor in reduced units.
inline constexpr double kRevivalTime = 2.0 * std::numbers::pi;

enum class Parity { even, odd };

[[nodiscard]] std::string to_string(Parity p);
[[nodiscard]] Parity parity_from_string(const std::string& s);

/// Exact positive rational p/q with gcd(p, q) = 1.
class Rational {
 public:
  Rational(std::int64_t num, std::int64_t den);

  [[nodiscard]] std::int64_t num() const noexcept { return num_; }
  [[nodiscard]] std::int64_t den() const noexcept { return den_; }
  [[nodiscard]] double value() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  [[nodiscard]] std::string str() const;

  /// Parses "p/q" or an integer "p".
  static Rational parse(const std::string& text);

  friend bool operator==(const Rational&, const Rational&) = default;

 private:
  std::int64_t num_;
  std::int64_t den_;
};

/**
 * Parity- and M-restricted angular momentum grid J_min, J_min+2, ..., J_max.
 *
 * J_min is |M| raised by one when needed to match the parity; J_max is
 * lowered to the largest value of that parity.
 */
class BasisSpec {
 public:
  static constexpr int kMinDimension = 21;

  BasisSpec(int m, Parity parity, int j_max);

  [[nodiscard]] int m() const noexcept { return m_; }
  [[nodiscard]] Parity parity() const noexcept { return parity_; }
  [[nodiscard]] int j_min() const noexcept { return j_min_; }
  [[nodiscard]] int j_max() const noexcept { return j_max_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }

  [[nodiscard]] int j_at(std::size_t index) const noexcept {
    return j_min_ + 2 * static_cast<int>(index);
  }
  [[nodiscard]] std::optional<std::size_t> index_of(int j) const noexcept;
  [[nodiscard]] std::vector<int> j_values() const;

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;

 private:
  int m_;
  Parity parity_;
  int j_min_;
  int j_max_;
  std::size_t dim_;
};

/**
 * Rotor level structure E_J = J(J+1)/2 - eps * J^2 (J+1)^2.
 *
 * eps = 0 is the rigid rotor. eps = D/(2B) maps the spectroscopic
 * centrifugal constant onto reduced units.
 */
class RotorSpectrum {
 public:
  explicit RotorSpectrum(double centrifugal_eps = 0.0);

  [[nodiscard]] double epsilon() const noexcept { return eps_; }
  [[nodiscard]] bool rigid() const noexcept { return eps_ == 0.0; }
  [[nodiscard]] double energy(int j) const;

  /// Throws unless E_J increases monotonically up to J_max.
  void check_grid(const BasisSpec& basis) const;

  /// E_J for every grid point, after check_grid().
  [[nodiscard]] Eigen::VectorXd energies(const BasisSpec& basis) const;

  /**
   * Phase factors exp(-i E_J t) for t = 2*pi * num/den.
   *
   * The rigid part is reduced modulo 2*pi in integer arithmetic so that
   * commensurate times (revivals, fractional revivals) are exact.
   */
  [[nodiscard]] Eigen::VectorXcd free_phases(const BasisSpec& basis, std::int64_t num,
                                             std::int64_t den) const;

  /// Phase factors exp(-i E_J t) for an arbitrary reduced time.
  [[nodiscard]] Eigen::VectorXcd free_phases(const BasisSpec& basis, double t) const;

  friend bool operator==(const RotorSpectrum&, const RotorSpectrum&) = default;

 private:
  double eps_;
};

[[nodiscard]] double energy_level(int j, const RotorSpectrum& spectrum);

/// Molecular constants linking reduced units to SI / spectroscopic units.
class UnitBridge {
 public:
  /// B and D in cm^-1, polarizability anisotropy in Angstrom^3.
  explicit UnitBridge(double rotational_constant_cm, double centrifugal_constant_cm = 0.0,
                      std::optional<double> polarizability_anisotropy_A3 = std::nullopt);

  [[nodiscard]] double rotational_constant_cm() const noexcept { return b_cm_; }
  [[nodiscard]] double centrifugal_constant_cm() const noexcept { return d_cm_; }
  [[nodiscard]] const std::optional<double>& polarizability_anisotropy_A3() const noexcept {
    return delta_alpha_;
  }

  /// Reduced time unit I/hbar in seconds.
  [[nodiscard]] double time_unit_s() const noexcept;
  /// Reduced energy unit hbar^2/I in cm^-1 (equals 2B).
  [[nodiscard]] double energy_unit_cm() const noexcept { return 2.0 * b_cm_; }

  [[nodiscard]] double to_seconds(double reduced_time) const noexcept;
  [[nodiscard]] double to_reduced_time(double seconds) const noexcept;
  [[nodiscard]] double to_wavenumber(double reduced_energy) const noexcept;
  [[nodiscard]] double to_reduced_energy(double wavenumber_cm) const noexcept;

  [[nodiscard]] RotorSpectrum spectrum() const;

 private:
  double b_cm_;
  double d_cm_;
  std::optional<double> delta_alpha_;
};

/// 1/(2Bc) in seconds.
[[nodiscard]] double revival_time_si(const UnitBridge& bridge);

}  // namespace kickrot
