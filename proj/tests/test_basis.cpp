// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "kickrot/basis.hpp"
#include "kickrot/error.hpp"

namespace kickrot {
namespace {

TEST(BasisSpec, EvenGridStartsAtAbsM) {
  const BasisSpec b(0, Parity::even, 512);
  EXPECT_EQ(b.j_min(), 0);
  EXPECT_EQ(b.j_max(), 512);
  EXPECT_EQ(b.dimension(), 257u);
  EXPECT_EQ(b.j_at(10), 20);
  EXPECT_EQ(b.index_of(40), 20u);
  EXPECT_FALSE(b.index_of(41).has_value());
}

TEST(BasisSpec, ParityRaisesJMinAndLowersJMax) {
  const BasisSpec b(-3, Parity::even, 101);
  EXPECT_EQ(b.j_min(), 4);
  EXPECT_EQ(b.j_max(), 100);
  EXPECT_EQ(b.dimension(), 49u);
  const BasisSpec odd(0, Parity::odd, 100);
  EXPECT_EQ(odd.j_min(), 1);
  EXPECT_EQ(odd.j_max(), 99);
}

TEST(BasisSpec, RejectsTinyGrids) {
  EXPECT_THROW(BasisSpec(0, Parity::even, 30), ConfigError);
  EXPECT_NO_THROW(BasisSpec(0, Parity::even, 40));
}

TEST(Rational, ParsesReducedFractions) {
  EXPECT_EQ(Rational::parse("1/3"), Rational(1, 3));
  EXPECT_THROW(Rational::parse("2/6"), ConfigError);
  EXPECT_EQ(Rational::parse("1"), Rational(1, 1));
  EXPECT_EQ(Rational(1, 17).str(), "1/17");
  EXPECT_THROW(Rational::parse("1/0"), ConfigError);
  EXPECT_THROW(Rational::parse("x"), ConfigError);
  EXPECT_THROW(Rational::parse("-1/3"), ConfigError);
}

TEST(ParityNames, RoundTrip) {
  EXPECT_EQ(parity_from_string(to_string(Parity::odd)), Parity::odd);
  EXPECT_THROW(static_cast<void>(parity_from_string("both")), ConfigError);
}

TEST(RotorSpectrum, RigidLevels) {
  const RotorSpectrum s;
  EXPECT_DOUBLE_EQ(s.energy(0), 0.0);
  EXPECT_DOUBLE_EQ(s.energy(1), 1.0);
  EXPECT_DOUBLE_EQ(s.energy(10), 55.0);
}

TEST(RotorSpectrum, CentrifugalLevels) {
  const RotorSpectrum s(1e-4);
  EXPECT_DOUBLE_EQ(s.energy(10), 55.0 - 1e-4 * 100.0 * 121.0);
}

TEST(RotorSpectrum, GridCheckRequiresIncreasingLevels) {
  const double eps = 1.7651e-7;
  // 4 eps J(J+1) crosses 1 between J = 1189 and J = 1190.
  EXPECT_NO_THROW(RotorSpectrum(eps).check_grid(BasisSpec(0, Parity::even, 1188)));
  EXPECT_THROW(RotorSpectrum(eps).check_grid(BasisSpec(0, Parity::even, 1190)), ConfigError);
  const RotorSpectrum s(eps);
  const BasisSpec b(0, Parity::even, 1188);
  const auto e = s.energies(b);
  for (Eigen::Index i = 1; i < e.size(); ++i) EXPECT_GT(e[i], e[i - 1]);
}

TEST(RotorSpectrum, FullRevivalIsIdentity) {
  const RotorSpectrum s;
  const BasisSpec b(0, Parity::even, 512);
  const auto phases = s.free_phases(b, 1, 1);
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    EXPECT_NEAR(std::abs(phases[i] - 1.0), 0.0, 1e-15);
  }
}

TEST(RotorSpectrum, FractionalPhasesMatchDirectExponential) {
  const RotorSpectrum s;
  const BasisSpec b(0, Parity::odd, 101);
  const auto phases = s.free_phases(b, 1, 3);
  const double t = 2.0 * std::numbers::pi / 3.0;
  for (std::size_t i = 0; i < b.dimension(); ++i) {
    const double e = 0.5 * b.j_at(i) * (b.j_at(i) + 1.0);
    const std::complex<double> want = std::polar(1.0, -e * t);
    EXPECT_NEAR(std::abs(phases[static_cast<Eigen::Index>(i)] - want), 0.0, 1e-11);
  }
  const auto direct = s.free_phases(b, t);
  EXPECT_NEAR((phases - direct).norm(), 0.0, 1e-10);
}

TEST(UnitBridge, RevivalTimeIsInverseTwoBc) {
  const UnitBridge bridge(0.11415);
  EXPECT_NEAR(revival_time_si(bridge), 1.0 / (2.0 * 0.11415 * constants::speed_of_light_cm), 1e-22);
  EXPECT_NEAR(bridge.to_seconds(kRevivalTime), revival_time_si(bridge), 1e-22);
  EXPECT_NEAR(bridge.to_reduced_time(bridge.to_seconds(0.37)), 0.37, 1e-14);
}

TEST(UnitBridge, EnergyUnitIsTwoB) {
  const UnitBridge bridge(0.11415, 4.03e-8);
  EXPECT_DOUBLE_EQ(bridge.to_wavenumber(1.0), 2.0 * 0.11415);
  EXPECT_NEAR(bridge.to_reduced_energy(bridge.to_wavenumber(3.5)), 3.5, 1e-14);
  // B J(J+1) - D J^2 (J+1)^2 in cm^-1 over 2B.
  const RotorSpectrum s = bridge.spectrum();
  const int j = 20;
  const double cm = 0.11415 * j * (j + 1.0) - 4.03e-8 * j * j * (j + 1.0) * (j + 1.0);
  EXPECT_NEAR(s.energy(j), cm / (2.0 * 0.11415), 1e-10);
}

}  // namespace
}  // namespace kickrot
