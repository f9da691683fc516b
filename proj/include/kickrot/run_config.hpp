// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file run_config.hpp
 * @brief Resolved configuration of one CLI run.
 *
 * A RunConfig is read from a JSON document, possibly patched by command-line
 * flags, and validated before anything is computed or written. Validation
 * errors are ConfigError with the offending key in dotted form.
 */

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kickrot/basis.hpp"
#include "kickrot/propagation.hpp"

namespace kickrot {

enum class Scenario { states, spectrum_scan, dynamics, overlap_scan, alignment_ft, planar_ref };

[[nodiscard]] std::string to_string(Scenario s);
[[nodiscard]] Scenario scenario_from_string(const std::string& text);

struct BasisConfig {
  int m = 0;
  std::vector<Parity> parities{Parity::even};  ///< "both" expands to even, odd.
  int j_max = 512;
};

struct TrainConfig {
  std::vector<double> kick_strengths;  ///< One value, or an ascending grid for scans.
  Rational tau_fraction{1, 3};
  int pulses = 20;
  PulseShape shape = PulseShape::delta;
  std::optional<double> fwhm;     ///< Reduced time.
  std::optional<double> fwhm_fs;  ///< Converted with the molecular constants.
  std::optional<double> peak_intensity_w_cm2;  ///< Sets P from the pulse when given.
};

struct SpectrumConfig {
  double epsilon = 0.0;
  std::optional<double> b_cm;
  std::optional<double> d_cm;
  std::optional<double> delta_alpha_a3;

  [[nodiscard]] bool has_molecule() const noexcept { return b_cm.has_value(); }
  [[nodiscard]] UnitBridge bridge() const;
  [[nodiscard]] RotorSpectrum spectrum() const;
};

struct SamplingConfig {
  std::size_t omega_bins = 256;
  double window_trev = 3.0;         ///< Alignment trace length in revival periods.
  double oversampling = 4.0;        ///< Multiple of the Nyquist rate.
  double broadening_cm = 0.33;      ///< Needs molecular constants.
  std::optional<double> broadening; ///< Reduced angular frequency; overrides broadening_cm.
  std::size_t zero_padding = 8;
  std::vector<int> pulse_counts{2, 4, 6, 8, 10};
  int planar_grid = 64;
};

struct RunConfig {
  Scenario scenario = Scenario::states;
  std::filesystem::path output{"kickrot-out"};
  BasisConfig basis;
  TrainConfig train;
  SpectrumConfig spectrum;
  std::optional<double> temperature_k;
  std::vector<int> initial_j{0};
  SamplingConfig sampling;
  unsigned threads = 1;

  /// Throws ConfigError naming the first invalid key.
  void validate() const;

  /// P for a single-point run, after any pulse conversion.
  [[nodiscard]] double kick_strength() const;
  /// FWHM in reduced time for Gaussian trains.
  [[nodiscard]] double fwhm_reduced() const;
  /// Pulse train for kick strength p.
  [[nodiscard]] PulseTrainSpec train_spec(double p) const;
};

/// Parses a JSON document; unknown keys are rejected.
[[nodiscard]] RunConfig parse_run_config(const std::string& json_text);
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical JSON of the resolved configuration (sorted keys, fixed formatting).
[[nodiscard]] std::string to_json(const RunConfig& config);

/// Parses "a,b,c" or "start:stop:step" into a list of kick strengths.
[[nodiscard]] std::vector<double> parse_grid(const std::string& text, const std::string& key);

}  // namespace kickrot
