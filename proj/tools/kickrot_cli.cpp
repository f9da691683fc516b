// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

// kickrot: run one scenario and write its tables plus manifest.json.
//
//   kickrot states --P 3 --J-max 512 --output out/states
//   kickrot spectrum-scan --P 0:10:0.1 --threads 4
//   kickrot dynamics --config configs/icl_5K.json
//
// Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical abort.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kickrot/error.hpp"
#include "kickrot/run.hpp"
#include "kickrot/run_config.hpp"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// Flag values; unset flags leave the config file (or defaults) untouched.
struct Overrides {
  std::optional<std::string> output;
  std::optional<unsigned> threads;
  std::optional<int> m;
  std::optional<std::string> parity;
  std::optional<int> j_max;
  std::optional<std::string> kick_strengths;
  std::optional<std::string> tau;
  std::optional<int> pulses;
  std::optional<std::string> shape;
  std::optional<double> fwhm;
  std::optional<double> fwhm_fs;
  std::optional<double> peak_intensity;
  std::optional<double> epsilon;
  std::optional<double> b_cm;
  std::optional<double> d_cm;
  std::optional<double> delta_alpha;
  std::optional<double> temperature;
  std::optional<std::vector<int>> initial_j;
  std::optional<std::size_t> omega_bins;
  std::optional<double> window_trev;
  std::optional<double> oversampling;
  std::optional<double> broadening_cm;
  std::optional<double> broadening;
  std::optional<std::size_t> zero_padding;
  std::optional<std::vector<int>> pulse_counts;
  std::optional<int> planar_grid;
};

void add_flags(CLI::App& app, Overrides& o) {
  app.add_option("-o,--output", o.output, "Output directory");
  app.add_option("--threads", o.threads, "Maximum worker threads")->check(CLI::PositiveNumber);
  app.add_option("--M", o.m, "Magnetic quantum number");
  app.add_option("--parity", o.parity, "even, odd or both");
  app.add_option("--J-max", o.j_max, "Largest J on the grid");
  app.add_option("--P", o.kick_strengths, "Kick strength, list a,b,c or range start:stop:step");
  app.add_option("--tau", o.tau, "Pulse period as a fraction p/q of the revival time");
  app.add_option("--N", o.pulses, "Number of pulses");
  app.add_option("--shape", o.shape, "delta or gaussian");
  app.add_option("--fwhm", o.fwhm, "Gaussian FWHM in reduced time");
  app.add_option("--fwhm-fs", o.fwhm_fs, "Gaussian FWHM in femtoseconds");
  app.add_option("--peak-intensity", o.peak_intensity, "Peak intensity in W/cm^2 (sets P)");
  app.add_option("--epsilon", o.epsilon, "Reduced centrifugal parameter D/(2B)");
  app.add_option("--B-cm", o.b_cm, "Rotational constant in cm^-1");
  app.add_option("--D-cm", o.d_cm, "Centrifugal constant in cm^-1");
  app.add_option("--delta-alpha", o.delta_alpha, "Polarizability anisotropy in A^3");
  app.add_option("--temperature", o.temperature, "Temperature in K for a thermal ensemble");
  app.add_option("--initial-J", o.initial_j, "Initial J values")->delimiter(',');
  app.add_option("--omega-bins", o.omega_bins, "Histogram bins over [-pi, pi)");
  app.add_option("--window-trev", o.window_trev, "Alignment trace length in revival periods");
  app.add_option("--oversampling", o.oversampling, "Trace sampling as a multiple of Nyquist");
  app.add_option("--broadening-cm", o.broadening_cm, "Spectral line FWHM in cm^-1");
  app.add_option("--broadening", o.broadening, "Spectral line FWHM in reduced angular frequency");
  app.add_option("--zero-padding", o.zero_padding, "FFT zero-padding factor");
  app.add_option("--pulse-counts", o.pulse_counts, "Pulse counts for the alignment spectra")->delimiter(',');
  app.add_option("--planar-grid", o.planar_grid, "Planar rotor grid size");
}

void apply(const Overrides& o, kickrot::RunConfig& c) {
  using kickrot::ConfigError;
  if (o.output) c.output = *o.output;
  if (o.threads) c.threads = *o.threads;
  if (o.m) c.basis.m = *o.m;
  if (o.parity) {
    if (*o.parity == "both") {
      c.basis.parities = {kickrot::Parity::even, kickrot::Parity::odd};
    } else {
      try {
        c.basis.parities = {kickrot::parity_from_string(*o.parity)};
      } catch (const std::exception& e) {
        throw ConfigError("basis.parity", e.what());
      }
    }
  }
  if (o.j_max) c.basis.j_max = *o.j_max;
  if (o.kick_strengths) {
    c.train.kick_strengths = kickrot::parse_grid(*o.kick_strengths, "train.P_grid");
  }
  if (o.tau) {
    try {
      c.train.tau_fraction = kickrot::Rational::parse(*o.tau);
    } catch (const std::exception& e) {
      throw ConfigError("train.tau", e.what());
    }
  }
  if (o.pulses) c.train.pulses = *o.pulses;
  if (o.shape) {
    if (*o.shape == "delta") {
      c.train.shape = kickrot::PulseShape::delta;
    } else if (*o.shape == "gaussian") {
      c.train.shape = kickrot::PulseShape::gaussian;
    } else {
      throw ConfigError("train.shape", "expected delta or gaussian, got '" + *o.shape + "'");
    }
  }
  if (o.fwhm) c.train.fwhm = *o.fwhm;
  if (o.fwhm_fs) c.train.fwhm_fs = *o.fwhm_fs;
  if (o.peak_intensity) {
    c.train.peak_intensity_w_cm2 = *o.peak_intensity;
    if (!o.kick_strengths) c.train.kick_strengths.clear();
  }
  if (o.epsilon) c.spectrum.epsilon = *o.epsilon;
  if (o.b_cm) c.spectrum.b_cm = *o.b_cm;
  if (o.d_cm) c.spectrum.d_cm = *o.d_cm;
  if (o.delta_alpha) c.spectrum.delta_alpha_a3 = *o.delta_alpha;
  if (o.temperature) c.temperature_k = *o.temperature;
  if (o.initial_j) c.initial_j = *o.initial_j;
  if (o.omega_bins) c.sampling.omega_bins = *o.omega_bins;
  if (o.window_trev) c.sampling.window_trev = *o.window_trev;
  if (o.oversampling) c.sampling.oversampling = *o.oversampling;
  if (o.broadening_cm) c.sampling.broadening_cm = *o.broadening_cm;
  if (o.broadening) c.sampling.broadening = *o.broadening;
  if (o.zero_padding) c.sampling.zero_padding = *o.zero_padding;
  if (o.pulse_counts) c.sampling.pulse_counts = *o.pulse_counts;
  if (o.planar_grid) c.sampling.planar_grid = *o.planar_grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasienergy states and dynamics of periodically kicked 3D quantum rotors", "kickrot"};
  app.set_version_flag("--version", std::string(kickrot::kLibraryVersion));
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  Overrides overrides;
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  add_flags(app, overrides);

  const std::pair<const char*, const char*> scenarios[] = {
      {"states", "Quasienergies, edge-state profiles and discrete levels"},
      {"spectrum-scan", "Quasienergies and density histogram over a P grid"},
      {"dynamics", "Populations and energy along a pulse train"},
      {"overlap-scan", "Edge-state overlap of initial states over a P grid"},
      {"alignment-ft", "Alignment trace and its spectrum after each pulse count"},
      {"planar-ref", "Quasienergies of the planar rotor reference"}};
  for (const auto& [name, about] : scenarios) app.add_subcommand(name, about)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    kickrot::RunConfig config = config_path ? kickrot::load_run_config(*config_path) : kickrot::RunConfig{};
    config.scenario = kickrot::scenario_from_string(app.get_subcommands().front()->get_name());
    apply(overrides, config);
    const kickrot::RunResult result = kickrot::run(config);
    for (const auto& f : result.files) std::cout << f.string() << '\n';
    return 0;
  } catch (const kickrot::ConfigError& e) {
    std::cerr << "kickrot: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const kickrot::NumericalError& e) {
    std::cerr << "kickrot: numerical abort: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "kickrot: " << e.what() << '\n';
    return kExitIo;
  }
}
