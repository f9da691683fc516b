// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

#include "kickrot/basis.hpp"

#include <cmath>
#include <numeric>

#include "kickrot/error.hpp"

namespace kickrot {

std::string to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

Parity parity_from_string(const std::string& s) {
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  throw ConfigError("parity", "expected 'even' or 'odd', got '" + s + "'");
}

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  if (num <= 0 || den <= 0) {
    throw ConfigError("tau", "period fraction must be a positive rational p/q");
  }
  if (std::gcd(num, den) != 1) {
    throw ConfigError("tau", "p and q must be coprime (got " + std::to_string(num) + "/" +
                                 std::to_string(den) + ")");
  }
}

std::string Rational::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational Rational::parse(const std::string& text) {
  auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      auto p = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {p, 1};
    }
    auto num_text = text.substr(0, slash);
    auto den_text = text.substr(slash + 1);
    auto p = std::stoll(num_text, &used);
    if (used != num_text.size()) throw std::invalid_argument(text);
    auto q = std::stoll(den_text, &used);
    if (used != den_text.size()) throw std::invalid_argument(text);
    return {p, q};
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("tau", "cannot parse '" + text + "' as p/q");
  }
}

BasisSpec::BasisSpec(int m, Parity parity, int j_max) : m_(m), parity_(parity) {
  const int want = parity == Parity::even ? 0 : 1;
  j_min_ = std::abs(m);
  if (j_min_ % 2 != want) ++j_min_;
  j_max_ = j_max;
  if (j_max_ >= 0 && j_max_ % 2 != want) --j_max_;
  if (j_max_ < j_min_) {
    throw ConfigError("J_max", "J_max = " + std::to_string(j_max) + " is below J_min = " +
                                   std::to_string(j_min_));
  }
  dim_ = static_cast<std::size_t>((j_max_ - j_min_) / 2 + 1);
  if (dim_ < kMinDimension) {
    throw ConfigError("J_max", "basis has " + std::to_string(dim_) + " states, need at least " +
                                   std::to_string(kMinDimension));
  }
}

std::optional<std::size_t> BasisSpec::index_of(int j) const noexcept {
  if (j < j_min_ || j > j_max_ || (j - j_min_) % 2 != 0) return std::nullopt;
  return static_cast<std::size_t>((j - j_min_) / 2);
}

std::vector<int> BasisSpec::j_values() const {
  std::vector<int> js(dim_);
  for (std::size_t i = 0; i < dim_; ++i) js[i] = j_at(i);
  return js;
}

RotorSpectrum::RotorSpectrum(double centrifugal_eps) : eps_(centrifugal_eps) {
  if (!(eps_ >= 0.0) || !std::isfinite(eps_)) {
    throw ConfigError("epsilon", "centrifugal coefficient must be finite and >= 0");
  }
}

double RotorSpectrum::energy(int j) const {
  if (j < 0) throw ConfigError("J", "angular momentum must be >= 0");
  const double jj = static_cast<double>(j) * (j + 1);
  return 0.5 * jj - eps_ * jj * jj;
}

void RotorSpectrum::check_grid(const BasisSpec& basis) const {
  // dE/dJ = (2J+1) (1/2 - 2 eps J(J+1)) must stay positive up to J_max.
  const double j = basis.j_max();
  const double ratio = 4.0 * eps_ * j * (j + 1.0);
  if (ratio >= 1.0) {
    throw ConfigError("epsilon", "energy levels stop increasing below J_max = " +
                                     std::to_string(basis.j_max()) + " (4 eps J(J+1) = " +
                                     std::to_string(ratio) + " >= 1); lower J_max");
  }
}

Eigen::VectorXd RotorSpectrum::energies(const BasisSpec& basis) const {
  check_grid(basis);
  Eigen::VectorXd e(basis.dimension());
  for (std::size_t i = 0; i < basis.dimension(); ++i) e[i] = energy(basis.j_at(i));
  return e;
}

Eigen::VectorXcd RotorSpectrum::free_phases(const BasisSpec& basis, std::int64_t num,
                                            std::int64_t den) const {
  check_grid(basis);
  constexpr double pi = std::numbers::pi;
  Eigen::VectorXcd out(basis.dimension());
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const std::int64_t j = basis.j_at(i);
    // E_J t = pi J(J+1) num/den, reduced exactly modulo 2 pi.
    const std::int64_t k = ((j * (j + 1)) % (2 * den)) * (num % (2 * den)) % (2 * den);
    double phase = -pi * static_cast<double>(k) / static_cast<double>(den);
    if (eps_ != 0.0) {
      const double jj = static_cast<double>(j * (j + 1));
      double turns = eps_ * jj * jj * static_cast<double>(num) / static_cast<double>(den);
      turns -= std::floor(turns);
      phase += 2.0 * pi * turns;
    }
    out[i] = std::polar(1.0, phase);
  }
  return out;
}

Eigen::VectorXcd RotorSpectrum::free_phases(const BasisSpec& basis, double t) const {
  const Eigen::VectorXd e = energies(basis);
  Eigen::VectorXcd out(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) out[i] = std::polar(1.0, -e[i] * t);
  return out;
}

double energy_level(int j, const RotorSpectrum& spectrum) { return spectrum.energy(j); }

UnitBridge::UnitBridge(double rotational_constant_cm, double centrifugal_constant_cm,
                       std::optional<double> polarizability_anisotropy_A3)
    : b_cm_(rotational_constant_cm),
      d_cm_(centrifugal_constant_cm),
      delta_alpha_(polarizability_anisotropy_A3) {
  if (!(b_cm_ > 0.0) || !std::isfinite(b_cm_)) {
    throw ConfigError("B_cm", "rotational constant must be positive");
  }
  if (!(d_cm_ >= 0.0) || !std::isfinite(d_cm_)) {
    throw ConfigError("D_cm", "centrifugal constant must be >= 0");
  }
  if (delta_alpha_ && !(*delta_alpha_ > 0.0)) {
    throw ConfigError("delta_alpha_A3", "polarizability anisotropy must be positive");
  }
}

double UnitBridge::time_unit_s() const noexcept {
  // I/hbar = 1/(4 pi B c) with B in cm^-1 and c in cm/s.
  return 1.0 / (4.0 * std::numbers::pi * b_cm_ * constants::speed_of_light_cm);
}

double UnitBridge::to_seconds(double reduced_time) const noexcept {
  return reduced_time * time_unit_s();
}

double UnitBridge::to_reduced_time(double seconds) const noexcept {
  return seconds / time_unit_s();
}

double UnitBridge::to_wavenumber(double reduced_energy) const noexcept {
  return reduced_energy * energy_unit_cm();
}

double UnitBridge::to_reduced_energy(double wavenumber_cm) const noexcept {
  return wavenumber_cm / energy_unit_cm();
}

RotorSpectrum UnitBridge::spectrum() const { return RotorSpectrum(d_cm_ / (2.0 * b_cm_)); }

double revival_time_si(const UnitBridge& bridge) {
  return 1.0 / (2.0 * bridge.rotational_constant_cm() * constants::speed_of_light_cm);
}

}  // namespace kickrot
