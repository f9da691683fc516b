// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "kickrot/error.hpp"
#include "kickrot/floquet.hpp"

namespace kickrot {
namespace {

constexpr double kPi = std::numbers::pi;

PulseTrainSpec delta_train(double p, Rational tau, int pulses = 1) {
  PulseTrainSpec t;
  t.kick_strength = p;
  t.tau_fraction = tau;
  t.pulses = pulses;
  return t;
}

QuasienergySet states(double p, Rational tau, const BasisSpec& b) {
  return classify_edge_states(quasienergy_decomposition(one_cycle_operator(delta_train(p, tau), b, RotorSpectrum())));
}

TEST(WrapQuasienergy, HalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_quasienergy(0.5), 0.5);
  EXPECT_NEAR(wrap_quasienergy(kPi), -kPi, 1e-15);
  EXPECT_NEAR(wrap_quasienergy(-kPi - 0.25), kPi - 0.25, 1e-15);
  EXPECT_NEAR(wrap_quasienergy(7.0 * kPi + 0.1), -kPi + 0.1, 1e-13);
}

TEST(Decomposition, EigenRelationAndOrthonormality) {
  const BasisSpec b(0, Parity::even, 256);
  const OneCycleOperator u = one_cycle_operator(delta_train(3.0, {1, 3}), b, RotorSpectrum());
  const QuasienergySet set = quasienergy_decomposition(u);
  ASSERT_EQ(set.size(), b.dimension());
  Eigen::MatrixXcd v(set.size(), set.size());
  for (std::size_t a = 0; a < set.size(); ++a) {
    const auto& s = set[a];
    const Eigen::VectorXcd residual = u.matrix() * s.vector - std::polar(1.0, -s.omega) * s.vector;
    EXPECT_LT(residual.norm(), 1e-10);
    EXPECT_GE(s.omega, -kPi);
    EXPECT_LT(s.omega, kPi);
    if (a > 0) {
      EXPECT_LE(set[a - 1].omega, s.omega);
    }
    v.col(static_cast<Eigen::Index>(a)) = s.vector;
  }
  const auto n = v.cols();
  EXPECT_LT((v.adjoint() * v - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Decomposition, FreeRotorQuasienergies) {
  const BasisSpec b(0, Parity::even, 100);
  const QuasienergySet set = states(0.0, {1, 3}, b);
  std::vector<double> want;
  for (int j : b.j_values()) {
    // omega = -arg(exp(-i E_J tau)) = E_J tau wrapped; E_J tau is j(j+1)/2 * 2pi/3.
    const long twice = static_cast<long>(j) * (j + 1) / 2;
    want.push_back(wrap_quasienergy(2.0 * kPi * static_cast<double>(twice % 3) / 3.0));
  }
  std::sort(want.begin(), want.end());
  const std::vector<double> got = set.omegas();
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(Classification, TwoEdgeStatesAtPThree) {
  const QuasienergySet set = states(3.0, {1, 3}, BasisSpec(0, Parity::even, 512));
  EXPECT_TRUE(set.classified());
  EXPECT_EQ(set.count(StateClass::edge), 2u);
  for (const auto& s : set.entries()) {
    if (s.cls == StateClass::edge) {
      EXPECT_GT(s.lower_weight, kEdgeLowerThreshold);
      EXPECT_LT(s.upper_weight, kEdgeUpperThreshold);
    }
    if (s.cls == StateClass::artifact) {
      EXPECT_GT(s.upper_weight, kArtifactThreshold);
    }
  }
  EXPECT_GT(set.count(StateClass::artifact), 0u);
}

TEST(Classification, RejectsOverlappingWindows) {
  const BasisSpec b(0, Parity::even, 70);
  EXPECT_THROW(static_cast<void>(states(1.0, {1, 3}, b)), ConfigError);
}

TEST(Overlap, GroundAndHighInitialStates) {
  const BasisSpec b(0, Parity::even, 512);
  const QuasienergySet set = states(3.0, {1, 3}, b);
  const OverlapReport ground = edge_overlap(WaveFunction::basis_state(b, 0), set);
  EXPECT_GT(ground.overlap, 0.5);
  EXPECT_LE(ground.overlap, 1.0);
  double sum = 0.0;
  for (const auto& c : ground.contributions) sum += c.weight;
  EXPECT_NEAR(sum, ground.overlap, 1e-14);
  EXPECT_LT(edge_overlap(WaveFunction::basis_state(b, 40), set).overlap, 0.01);
}

TEST(Reconstruction, MatchesDirectPropagation) {
  const BasisSpec b(0, Parity::even, 512);
  const RotorSpectrum s;
  const PulseTrainSpec train = delta_train(3.0, {1, 3}, 20);
  const OneCycleOperator u = one_cycle_operator(train, b, s);
  const QuasienergySet set = quasienergy_decomposition(u);
  const WaveFunction psi0 = WaveFunction::basis_state(b, 0);
  const auto run = propagate_train(psi0, u, 20);
  const WaveFunction rec = reconstruct_from_quasienergies(psi0, set, 20);
  EXPECT_LT((rec.coeffs() - run.back().coeffs()).norm(), 1e-8);
}

TEST(Classification, NoEdgeStatesAtFullResonance) {
  const BasisSpec b(0, Parity::even, 512);
  const KickPropagator kick(cos2_matrix(b));
  for (double p : {1.0, 3.0, 5.0, 10.0}) {
    const QuasienergySet set =
        classify_edge_states(quasienergy_decomposition(one_cycle_operator(delta_train(p, {1, 1}), kick, RotorSpectrum())));
    EXPECT_EQ(set.count(StateClass::edge), 0u) << "P=" << p;
  }
}

TEST(Bands, ThreeBandsAtThirdRevival) {
  const QuasienergySet set = states(1.0, {1, 3}, BasisSpec(0, Parity::even, 512));
  const std::vector<double> extended = set.omegas(StateClass::extended);
  auto bands = find_bands(extended, 0.1);
  std::sort(bands.begin(), bands.end(), [](const Band& x, const Band& y) { return x.count > y.count; });
  ASSERT_GE(bands.size(), 3u);
  const std::size_t top3 = bands[0].count + bands[1].count + bands[2].count;
  EXPECT_GT(static_cast<double>(top3), 0.9 * static_cast<double>(extended.size()));
}

TEST(Bands, RunsOnTheCircle) {
  const std::vector<double> omegas{-3.14, -3.1, 0.0, 0.001, 0.002, 1.0, 3.12};
  const auto bands = find_bands(omegas, 0.05);
  ASSERT_EQ(bands.size(), 3u);
  std::size_t total = 0;
  for (const auto& band : bands) total += band.count;
  EXPECT_EQ(total, omegas.size());
  const auto wrap = std::find_if(bands.begin(), bands.end(), [](const Band& x) { return x.count == 3 && x.lower > 0; });
  ASSERT_NE(wrap, bands.end());
  EXPECT_NEAR(wrap->width, 2.0 * kPi - 3.12 - 3.1, 1e-12);
}

TEST(Bands, SingleClusterIsOneBand) {
  const auto bands = find_bands({0.1, 0.1, 0.1}, 1e-3);
  ASSERT_EQ(bands.size(), 1u);
  EXPECT_EQ(bands[0].count, 3u);
  EXPECT_DOUBLE_EQ(bands[0].width, 0.0);
}

TEST(Bands, FreeRotorAtThirdRevivalHasTwoLevels) {
  // E_J tau mod 2pi takes the values 0 and 2pi/3 on even J.
  const auto bands = spectral_bands(states(0.0, {1, 3}, BasisSpec(0, Parity::even, 200)));
  EXPECT_EQ(bands.size(), 2u);
}

TEST(DiscreteLevels, IsolatedEdgeLevelAtPThree) {
  const auto levels = discrete_edge_levels(states(3.0, {1, 3}, BasisSpec(0, Parity::even, 512)));
  ASSERT_FALSE(levels.empty());
  for (const auto& l : levels) EXPECT_GT(l.gap, 2.0 * kPi / 257.0);
  EXPECT_TRUE(std::any_of(levels.begin(), levels.end(), [](const DiscreteLevel& l) { return l.omega > 0 && l.omega < kPi / 2; }));
  const QuasienergySet raw = quasienergy_decomposition(
      one_cycle_operator(delta_train(3.0, {1, 3}), BasisSpec(0, Parity::even, 512), RotorSpectrum()));
  EXPECT_THROW(static_cast<void>(discrete_edge_levels(raw)), std::logic_error);
}

TEST(SpectrumScan, PointsHistogramAndErrors) {
  const BasisSpec b(0, Parity::even, 200);
  const std::vector<double> grid{0.0, 1.0, 2.0};
  const ScanResult r = spectrum_scan(grid, {1, 3}, b, RotorSpectrum(), {16, 2});
  ASSERT_EQ(r.points.size(), 3u);
  ASSERT_EQ(r.histogram.counts.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_FALSE(r.points[i].error.has_value());
    EXPECT_DOUBLE_EQ(r.points[i].kick_strength, grid[i]);
    int total = 0;
    for (int c : r.histogram.counts[i]) total += c;
    const auto kept = std::count_if(r.points[i].levels.begin(), r.points[i].levels.end(),
                                    [](const ScanLevel& l) { return l.cls != StateClass::artifact; });
    EXPECT_EQ(total, kept);
    EXPECT_EQ(r.points[i].levels.size(), b.dimension());
  }
  EXPECT_NEAR(r.histogram.bin_center(0), -kPi + kPi / 16.0, 1e-15);
  const ScanResult serial = spectrum_scan(grid, {1, 3}, b, RotorSpectrum(), {16, 1});
  EXPECT_EQ(serial.histogram.counts, r.histogram.counts);
  const std::vector<double> descending{2.0, 1.0};
  EXPECT_THROW(static_cast<void>(spectrum_scan(descending, {1, 3}, b, RotorSpectrum())), ConfigError);
}

TEST(Planar, TwoValuesAtHalfRevival) {
  for (double p : {0.5, 2.0, 5.0}) {
    const auto omega = planar_reference_spectrum(p, {1, 2}, 64);
    for (double w : omega) {
      const double to_zero = std::abs(w);
      const double to_pi = kPi - std::abs(w);
      EXPECT_LT(std::min(to_zero, to_pi), 1e-8) << w;
    }
  }
  const Eigen::MatrixXcd u = planar_one_cycle_matrix(2.0, {1, 2}, 64);
  const Eigen::MatrixXcd u2 = u * u;
  const auto n = u.rows();
  // Two kicks at the planar anti-resonance return every state up to a global phase.
  const std::complex<double> phase = u2(0, 0);
  EXPECT_LT((u2 - phase * Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-8);
}

}  // namespace
}  // namespace kickrot
