// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "kickrot/error.hpp"
#include "kickrot/observables.hpp"

namespace kickrot {
namespace {

constexpr double kPi = std::numbers::pi;

AlignmentTrace cosine_trace(double omega, double window, std::size_t samples, double offset = 0.3) {
  AlignmentTrace t;
  t.dt = window / static_cast<double>(samples - 1);
  for (std::size_t k = 0; k < samples; ++k) t.values.push_back(offset + std::cos(omega * t.dt * static_cast<double>(k)));
  return t;
}

TEST(Populations, EnergyAndMeanJ) {
  const BasisSpec b(0, Parity::even, 60);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(b.dimension()));
  c[1] = std::sqrt(0.25);
  c[2] = std::complex<double>(0.0, std::sqrt(0.75));
  const WaveFunction psi(b, c);
  const auto p = populations(psi);
  EXPECT_NEAR(p[1], 0.25, 1e-15);
  EXPECT_NEAR(p[2], 0.75, 1e-15);
  EXPECT_NEAR(mean_j(psi), 0.25 * 2 + 0.75 * 4, 1e-14);
  EXPECT_NEAR(rotational_energy(psi, RotorSpectrum()), 0.25 * 3 + 0.75 * 10, 1e-13);
}

TEST(Alignment, IsotropicGroundState) {
  const BasisSpec b(0, Parity::even, 60);
  EXPECT_NEAR(alignment_expectation(WaveFunction::basis_state(b, 0), cos2_matrix(b)), 1.0 / 3.0, 1e-15);
}

TEST(AlignmentTrace, TwoLevelBeat) {
  // (|0> + |2>)/sqrt2 beats at E_2 - E_0 = 3 with amplitude 2 * <0|cos^2|2> / 2.
  const BasisSpec b(0, Parity::even, 60);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(b.dimension()));
  c[0] = c[1] = 1.0 / std::sqrt(2.0);
  const WaveFunction psi(b, c);
  const CouplingMatrix cm = cos2_matrix(b);
  const RotorSpectrum s;
  EXPECT_DOUBLE_EQ(highest_beat_frequency(psi, s), 3.0);
  const std::size_t need = nyquist_samples(psi, s, 2.0 * kPi);
  EXPECT_THROW(static_cast<void>(alignment_trace(psi, s, cm, 2.0 * kPi, need - 1)), ConfigError);
  const AlignmentTrace t = alignment_trace(psi, s, cm, 2.0 * kPi, 4 * need, 2);
  EXPECT_EQ(t.pulses, 2);
  const double mean = 0.5 * (cos2_diagonal(0, 0) + cos2_diagonal(2, 0));
  const double amp = cos2_offdiagonal(0, 0);
  for (std::size_t k = 0; k < t.values.size(); k += 7) {
    EXPECT_NEAR(t.values[k], mean + amp * std::cos(3.0 * t.time_at(k)), 1e-13);
  }
}

TEST(AlignmentSpectrum, CosineLineHasRequestedWidth) {
  const double omega0 = 20.0;
  const double broadening = 0.5;
  const AlignmentTrace t = cosine_trace(omega0, 200.0, 8001);
  const AlignmentSpectrum s = alignment_spectrum(t, broadening, {16, std::nullopt});
  EXPECT_EQ(s.unit, "reduced");
  const auto peak = std::max_element(s.magnitudes.begin(), s.magnitudes.end()) - s.magnitudes.begin();
  const double step = s.frequencies[1] - s.frequencies[0];
  EXPECT_NEAR(s.frequencies[static_cast<std::size_t>(peak)], omega0, step);
  const double half = 0.5 * s.magnitudes[static_cast<std::size_t>(peak)];
  auto lo = static_cast<std::size_t>(peak);
  while (s.magnitudes[lo] > half) --lo;
  auto hi = static_cast<std::size_t>(peak);
  while (s.magnitudes[hi] > half) ++hi;
  // Linear interpolation of both half-maximum crossings.
  const double f_lo = s.frequencies[lo] + step * (half - s.magnitudes[lo]) / (s.magnitudes[lo + 1] - s.magnitudes[lo]);
  const double f_hi = s.frequencies[hi - 1] + step * (s.magnitudes[hi - 1] - half) / (s.magnitudes[hi - 1] - s.magnitudes[hi]);
  EXPECT_NEAR(f_hi - f_lo, broadening, 0.01 * broadening);
}

TEST(AlignmentSpectrum, Parseval) {
  AlignmentTrace t = cosine_trace(3.0, 60.0, 1500);
  for (std::size_t k = 0; k < t.values.size(); ++k) t.values[k] += 0.4 * std::sin(11.0 * t.dt * static_cast<double>(k));
  const double broadening = 0.4;
  const AlignmentSpectrum s = alignment_spectrum(t, broadening, {4, std::nullopt});
  double mean = 0.0;
  for (double v : t.values) mean += v;
  mean /= static_cast<double>(t.values.size());
  const double sigma = 2.0 * std::sqrt(2.0 * std::log(2.0)) / broadening;
  double time_energy = 0.0;
  for (std::size_t k = 0; k < t.values.size(); ++k) {
    const double x = t.dt * static_cast<double>(k) - 0.5 * t.window();
    const double w = (t.values[k] - mean) * std::exp(-0.5 * x * x / (sigma * sigma));
    time_energy += w * w;
  }
  double freq_energy = 0.0;
  for (double m : s.magnitudes) freq_energy += m * m;
  EXPECT_NEAR(freq_energy, time_energy, 1e-10 * time_energy);
}

TEST(AlignmentSpectrum, RejectsUnresolvableBroadening) {
  const AlignmentTrace t = cosine_trace(3.0, 10.0, 200);
  EXPECT_THROW(static_cast<void>(alignment_spectrum(t, 4.0 * kPi / 10.0 * 0.99)), ConfigError);
  EXPECT_NO_THROW(static_cast<void>(alignment_spectrum(t, 4.0 * kPi / 10.0 * 1.01)));
}

TEST(AlignmentSpectrum, WavenumberAxis) {
  const UnitBridge bridge(0.11415);
  const AlignmentSpectrum s = alignment_spectrum(cosine_trace(5.0, 60.0, 1000), 0.5, {2, bridge});
  EXPECT_EQ(s.unit, "cm^-1");
  EXPECT_NEAR(s.frequencies[1], bridge.to_wavenumber(2.0 * kPi / (2048.0 * 60.0 / 999.0)), 1e-12);
}

TEST(GroupCentroids, TwoSeparatedLines) {
  AlignmentTrace t = cosine_trace(5.0, 100.0, 4001);
  for (std::size_t k = 0; k < t.values.size(); ++k) t.values[k] += 0.5 * std::cos(30.0 * t.dt * static_cast<double>(k));
  const AlignmentSpectrum s = alignment_spectrum(t, 0.5, {8, std::nullopt});
  const GroupCentroids g = group_centroids(s, 15.0);
  EXPECT_NEAR(g.low, 5.0, 0.02);
  EXPECT_NEAR(g.high, 30.0, 0.02);
  EXPECT_NEAR(g.high_weight / g.low_weight, 0.25, 0.01);
}

// Boltzmann weights summed directly over levels, without the library's member list.
TEST(ThermalEnsemble, MatchesBoltzmannOracle) {
  const UnitBridge bridge(0.11415, 4.03e-8);
  const RotorSpectrum s = bridge.spectrum();
  const double t = 5.0;
  const double kt = 0.6950348 * t;  // cm^-1
  double z = 0.0;
  std::vector<double> level;
  for (int j = 0; j < 200; ++j) {
    const double e = 0.11415 * j * (j + 1.0) - 4.03e-8 * j * j * (j + 1.0) * (j + 1.0);
    level.push_back(std::exp(-e / kt));
    z += (2 * j + 1) * level.back();
  }
  double kept = 0.0;
  int j_top = 0;
  for (int j = 0; j < 200; ++j) {
    if (level[static_cast<std::size_t>(j)] / z >= kThermalCutoff) {
      kept += (2 * j + 1) * level[static_cast<std::size_t>(j)] / z;
      j_top = j;
    }
  }
  const ThermalEnsemble ens = thermal_ensemble(t, bridge, s);
  EXPECT_EQ(ens.max_j0(), j_top);
  EXPECT_EQ(ens.max_abs_m(), j_top);
  EXPECT_EQ(ens.size(), static_cast<std::size_t>((j_top + 1) * (j_top + 1)));
  double total = 0.0;
  for (const auto& m : ens.members()) {
    total += m.weight;
    const double want = level[static_cast<std::size_t>(m.j0)] / z / kept;
    EXPECT_NEAR(m.weight, want, 1e-6 * want);
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(kBoltzmannCm, 0.6950348, 1e-6);
}

TEST(ThermalEnsemble, ZeroTemperatureAndErrors) {
  const UnitBridge bridge(0.11415);
  const ThermalEnsemble ens = thermal_ensemble(0.0, bridge, RotorSpectrum());
  ASSERT_EQ(ens.size(), 1u);
  EXPECT_EQ(ens.members()[0].j0, 0);
  EXPECT_DOUBLE_EQ(ens.members()[0].weight, 1.0);
  try {
    static_cast<void>(thermal_ensemble(-1.0, bridge, RotorSpectrum()));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "temperature_K");
  }
}

TEST(EnsembleAverage, ScalarsAndMergedPopulations) {
  const ThermalEnsemble ens({{0, 0, 0.25}, {1, 0, 0.75}}, 1.0);
  const std::vector<std::vector<double>> scalars{{1.0, 2.0}, {3.0, 4.0}};
  const auto avg = ensemble_average(ens, scalars);
  EXPECT_DOUBLE_EQ(avg[0], 2.5);
  EXPECT_DOUBLE_EQ(avg[1], 3.5);

  const BasisSpec even(0, Parity::even, 60);
  const BasisSpec odd(0, Parity::odd, 61);
  std::vector<double> pe(even.dimension(), 0.0);
  std::vector<double> po(odd.dimension(), 0.0);
  pe[0] = 1.0;
  po[1] = 1.0;  // J = 3
  const std::vector<PopulationSeries> series{{even, {pe}}, {odd, {po}}};
  const auto merged = ensemble_average(ens, std::span<const PopulationSeries>(series));
  ASSERT_EQ(merged.size(), 1u);
  ASSERT_EQ(merged[0].size(), 62u);
  EXPECT_DOUBLE_EQ(merged[0][0], 0.25);
  EXPECT_DOUBLE_EQ(merged[0][3], 0.75);
}

TEST(PropagateEnsemble, BlocksMatchIndividualRuns) {
  const UnitBridge bridge(1.0);
  const ThermalEnsemble ens({{0, 0, 0.5}, {1, -1, 0.3}, {1, 1, 0.2}}, 1.0);
  PulseTrainSpec train;
  train.kick_strength = 2.0;
  train.tau_fraction = {1, 3};
  train.pulses = 5;
  const RotorSpectrum s;
  const EnsembleTrajectories run = propagate_ensemble(ens, 120, train, s, 2);
  ASSERT_EQ(run.members.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& m = ens.members()[i];
    const BasisSpec b(m.m, m.parity(), 120);
    const auto direct = propagate_train(WaveFunction::basis_state(b, m.j0), train, s);
    ASSERT_EQ(run.members[i].size(), 6u);
    EXPECT_LT((run.members[i].back().coeffs() - direct.back().coeffs()).norm(), 1e-10);
  }
  const auto pops = ensemble_populations(ens, run);
  ASSERT_EQ(pops.size(), 6u);
  for (const auto& p : pops) {
    double sum = 0.0;
    for (double x : p) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-10);
  }
}

TEST(FullResonance, RigidRotorGrowsWithoutReversal) {
  const BasisSpec b(0, Parity::even, 512);
  PulseTrainSpec train;
  train.kick_strength = 10.0;
  train.tau_fraction = {1, 1};
  train.pulses = 20;
  const auto rigid = propagate_train(WaveFunction::basis_state(b, 0), train, RotorSpectrum());
  for (std::size_t n = 1; n < rigid.size(); ++n) EXPECT_GT(mean_j(rigid[n]), mean_j(rigid[n - 1])) << n;
  // A centrifugal term detunes the resonance and the growth turns around.
  const auto bent = propagate_train(WaveFunction::basis_state(b, 0), train, RotorSpectrum(5e-7));
  bool reversed = false;
  for (std::size_t n = 1; n < bent.size(); ++n) reversed = reversed || mean_j(bent[n]) < mean_j(bent[n - 1]);
  EXPECT_TRUE(reversed);
}

TEST(Fits, PowerLawAndQuadratic) {
  std::vector<double> x;
  std::vector<double> y;
  for (int n = 1; n <= 20; ++n) {
    x.push_back(n);
    y.push_back(0.7 * std::pow(n, 1.5));
  }
  const PowerLawFit fit = fit_power_law(x, y);
  EXPECT_NEAR(fit.exponent, 1.5, 1e-12);
  EXPECT_NEAR(fit.prefactor, 0.7, 1e-12);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 0.3 * x[i] * x[i];
  EXPECT_NEAR(quadratic_prefactor(x, y), 0.3, 1e-14);
}

}  // namespace
}  // namespace kickrot
