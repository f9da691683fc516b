// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

#include "kickrot/observables.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <thread>
#include <utility>

#include "kickrot/error.hpp"

namespace kickrot {

namespace {

constexpr double kPi = std::numbers::pi;

// The FFTW planner is not reentrant.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::vector<double> populations(const WaveFunction& psi) {
  std::vector<double> out(psi.basis().dimension());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(psi.coeffs()[static_cast<Eigen::Index>(i)]);
  return out;
}

double rotational_energy(const WaveFunction& psi, const RotorSpectrum& spectrum) {
  const BasisSpec& basis = psi.basis();
  double e = 0.0;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    e += spectrum.energy(basis.j_at(i)) * std::norm(psi.coeffs()[static_cast<Eigen::Index>(i)]);
  }
  return e;
}

double alignment_expectation(const WaveFunction& psi, const CouplingMatrix& coupling) {
  if (!(psi.basis() == coupling.basis())) throw std::invalid_argument("alignment: grid mismatch");
  return coupling.expectation(psi.coeffs());
}

double mean_j(const WaveFunction& psi) {
  const BasisSpec& basis = psi.basis();
  double sum = 0.0;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    sum += basis.j_at(i) * std::norm(psi.coeffs()[static_cast<Eigen::Index>(i)]);
  }
  return sum;
}

double highest_beat_frequency(const WaveFunction& psi, const RotorSpectrum& spectrum) {
  const BasisSpec& basis = psi.basis();
  double top = 0.0;
  for (std::size_t i = 0; i + 1 < basis.dimension(); ++i) {
    const auto a = static_cast<Eigen::Index>(i);
    if (std::norm(psi.coeffs()[a]) > kBeatPopulationFloor &&
        std::norm(psi.coeffs()[a + 1]) > kBeatPopulationFloor) {
      top = std::max(top, std::abs(spectrum.energy(basis.j_at(i + 1)) - spectrum.energy(basis.j_at(i))));
    }
  }
  return top;
}

std::size_t nyquist_samples(const WaveFunction& psi, const RotorSpectrum& spectrum, double window) {
  // Nyquist rate for angular frequency w is w / pi samples per unit time.
  const double rate = highest_beat_frequency(psi, spectrum) / kPi;
  return static_cast<std::size_t>(std::ceil(window * rate)) + 1;
}

AlignmentTrace alignment_trace(const WaveFunction& psi, const RotorSpectrum& spectrum,
                               const CouplingMatrix& coupling, double window, std::size_t samples,
                               int pulses) {
  if (!(psi.basis() == coupling.basis())) throw std::invalid_argument("alignment_trace: grid mismatch");
  if (!(window > 0.0)) throw ConfigError("window", "trace window must be positive");
  const std::size_t needed = std::max<std::size_t>(2, nyquist_samples(psi, spectrum, window));
  if (samples < needed) {
    throw ConfigError("samples", "sampling below the Nyquist rate: " + std::to_string(samples) +
                                     " samples given, at least " + std::to_string(needed) + " required");
  }
  const BasisSpec& basis = psi.basis();
  const auto n = static_cast<Eigen::Index>(basis.dimension());
  const Eigen::VectorXd energies = spectrum.energies(basis);
  const Eigen::VectorXcd& c = psi.coeffs();

  // <cos^2>(t) = sum d_i |c_i|^2 + 2 Re sum o_i conj(c_i) c_{i+1} exp(i (E_i - E_{i+1}) t).
  double stationary = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) stationary += coupling.diagonal()[i] * std::norm(c[i]);
  std::vector<std::complex<double>> coherence;
  std::vector<double> beat;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const std::complex<double> z = coupling.off_diagonal()[i] * std::conj(c[i]) * c[i + 1];
    if (z == 0.0) continue;
    coherence.push_back(z);
    beat.push_back(energies[i] - energies[i + 1]);
  }

  AlignmentTrace trace;
  trace.start_time = psi.time();
  trace.dt = window / static_cast<double>(samples - 1);
  trace.pulses = pulses;
  trace.values.resize(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = trace.dt * static_cast<double>(k);
    double v = stationary;
    for (std::size_t b = 0; b < coherence.size(); ++b) {
      v += 2.0 * (coherence[b] * std::polar(1.0, beat[b] * t)).real();
    }
    trace.values[k] = v;
  }
  return trace;
}

AlignmentSpectrum alignment_spectrum(const AlignmentTrace& trace, double broadening,
                                     const SpectrumOptions& options) {
  const std::size_t n = trace.values.size();
  if (n < 2 || !(trace.dt > 0.0)) throw ConfigError("trace", "need at least two uniform samples");
  if (options.zero_padding < 1) throw ConfigError("zero_padding", "must be >= 1");
  const double window = trace.window();
  if (!(broadening >= 4.0 * kPi / window)) {
    throw ConfigError("broadening", "broadening " + std::to_string(broadening) +
                                        " is below the resolvable 4 pi / window = " +
                                        std::to_string(4.0 * kPi / window));
  }

  double mean = 0.0;
  for (double v : trace.values) mean += v;
  mean /= static_cast<double>(n);

  // |FT of exp(-t^2 / 2 s^2)| has FWHM 2 sqrt(2 ln 2) / s in angular frequency.
  const double sigma = 2.0 * std::sqrt(2.0 * std::log(2.0)) / broadening;
  const double centre = 0.5 * window;
  const std::size_t padded = std::bit_ceil(options.zero_padding * n);

  double* in = fftw_alloc_real(padded);
  fftw_complex* out = fftw_alloc_complex(padded / 2 + 1);
  std::unique_ptr<double, decltype(&fftw_free)> in_guard(in, fftw_free);
  std::unique_ptr<fftw_complex, decltype(&fftw_free)> out_guard(out, fftw_free);
  std::fill(in, in + padded, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = trace.dt * static_cast<double>(k) - centre;
    in[k] = (trace.values[k] - mean) * std::exp(-0.5 * t * t / (sigma * sigma));
  }
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(padded), in, out, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("alignment_spectrum: FFT planning failed");
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  AlignmentSpectrum spec;
  const std::size_t bins = padded / 2 + 1;
  spec.frequencies.resize(bins);
  spec.magnitudes.resize(bins);
  const double step = 2.0 * kPi / (static_cast<double>(padded) * trace.dt);
  for (std::size_t k = 0; k < bins; ++k) {
    // Bins other than DC and Nyquist stand for a +-frequency pair.
    const double fold = (k == 0 || 2 * k == padded) ? 1.0 : 2.0;
    const double mag2 = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    spec.magnitudes[k] = std::sqrt(fold * mag2 / static_cast<double>(padded));
    const double w = step * static_cast<double>(k);
    spec.frequencies[k] = options.bridge ? options.bridge->to_wavenumber(w) : w;
  }
  spec.unit = options.bridge ? "cm^-1" : "reduced";
  return spec;
}

GroupCentroids group_centroids(const AlignmentSpectrum& spectrum, double split) {
  GroupCentroids g;
  double low_sum = 0.0;
  double high_sum = 0.0;
  for (std::size_t k = 1; k < spectrum.frequencies.size(); ++k) {
    const double f = spectrum.frequencies[k];
    const double w = spectrum.magnitudes[k] * spectrum.magnitudes[k];
    if (f < split) {
      g.low_weight += w;
      low_sum += w * f;
    } else {
      g.high_weight += w;
      high_sum += w * f;
    }
  }
  if (g.low_weight > 0.0) g.low = low_sum / g.low_weight;
  if (g.high_weight > 0.0) g.high = high_sum / g.high_weight;
  return g;
}

ThermalEnsemble::ThermalEnsemble(std::vector<EnsembleMember> members, double temperature_k)
    : members_(std::move(members)), temperature_(temperature_k) {
  if (members_.empty()) throw std::invalid_argument("ThermalEnsemble: no members");
}

int ThermalEnsemble::max_j0() const {
  int top = 0;
  for (const auto& m : members_) top = std::max(top, m.j0);
  return top;
}

int ThermalEnsemble::max_abs_m() const {
  int top = 0;
  for (const auto& m : members_) top = std::max(top, std::abs(m.m));
  return top;
}

ThermalEnsemble thermal_ensemble(double temperature_k, const UnitBridge& bridge,
                                 const RotorSpectrum& spectrum) {
  if (!(temperature_k >= 0.0) || !std::isfinite(temperature_k)) {
    throw ConfigError("temperature_K", "temperature must be finite and >= 0");
  }
  if (temperature_k == 0.0) return ThermalEnsemble({{0, 0, 1.0}}, 0.0);

  const double kt = kBoltzmannCm * temperature_k;
  // Level factors exp(-E_J / kT) until they no longer matter; stop before E_J turns over.
  std::vector<double> factor;
  double partition = 0.0;
  for (int j = 0;; ++j) {
    if (4.0 * spectrum.epsilon() * j * (j + 1.0) >= 1.0) break;
    const double f = std::exp(-bridge.to_wavenumber(spectrum.energy(j)) / kt);
    factor.push_back(f);
    partition += (2.0 * j + 1.0) * f;
    if ((2.0 * j + 1.0) * f < 1e-30 * partition) break;
  }

  std::vector<EnsembleMember> members;
  double kept = 0.0;
  for (int j = 0; j < static_cast<int>(factor.size()); ++j) {
    const double w = factor[static_cast<std::size_t>(j)] / partition;
    if (w < kThermalCutoff) continue;
    for (int m = -j; m <= j; ++m) {
      members.push_back({j, m, w});
      kept += w;
    }
  }
  for (auto& m : members) m.weight /= kept;
  return {std::move(members), temperature_k};
}

std::vector<double> ensemble_average(const ThermalEnsemble& ensemble,
                                     std::span<const std::vector<double>> per_member) {
  if (per_member.size() != ensemble.size()) {
    throw std::invalid_argument("ensemble_average: one sequence per member required");
  }
  const std::size_t len = per_member.front().size();
  std::vector<double> out(len, 0.0);
  for (std::size_t i = 0; i < per_member.size(); ++i) {
    if (per_member[i].size() != len) {
      throw std::invalid_argument("ensemble_average: sequences differ in length");
    }
    const double w = ensemble.members()[i].weight;
    for (std::size_t k = 0; k < len; ++k) out[k] += w * per_member[i][k];
  }
  return out;
}

std::vector<std::vector<double>> ensemble_average(const ThermalEnsemble& ensemble,
                                                  std::span<const PopulationSeries> per_member) {
  if (per_member.size() != ensemble.size()) {
    throw std::invalid_argument("ensemble_average: one population series per member required");
  }
  int lo = per_member.front().basis.j_max();
  int hi = lo;
  const std::size_t snapshots = per_member.front().snapshots.size();
  for (const auto& s : per_member) {
    lo = std::min(lo, s.basis.j_max());
    hi = std::max(hi, s.basis.j_max());
    if (s.snapshots.size() != snapshots) {
      throw std::invalid_argument("ensemble_average: members differ in snapshot count");
    }
  }
  if (hi - lo > 1) {
    throw std::invalid_argument("ensemble_average: members use different J_max (" + std::to_string(lo) +
                                " and " + std::to_string(hi) + ")");
  }
  std::vector<std::vector<double>> out(snapshots, std::vector<double>(static_cast<std::size_t>(hi) + 1, 0.0));
  for (std::size_t i = 0; i < per_member.size(); ++i) {
    const double w = ensemble.members()[i].weight;
    const PopulationSeries& s = per_member[i];
    for (std::size_t n = 0; n < snapshots; ++n) {
      if (s.snapshots[n].size() != s.basis.dimension()) {
        throw std::invalid_argument("ensemble_average: population vector does not match its grid");
      }
      for (std::size_t k = 0; k < s.basis.dimension(); ++k) {
        out[n][static_cast<std::size_t>(s.basis.j_at(k))] += w * s.snapshots[n][k];
      }
    }
  }
  return out;
}

EnsembleTrajectories propagate_ensemble(const ThermalEnsemble& ensemble, int j_max,
                                        const PulseTrainSpec& train, const RotorSpectrum& spectrum,
                                        unsigned threads) {
  train.validate();
  // Members sharing |M| and parity share one cycle operator.
  std::map<std::pair<int, int>, std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto& m = ensemble.members()[i];
    blocks[{std::abs(m.m), m.j0 % 2}].push_back(i);
  }
  std::vector<std::pair<std::pair<int, int>, std::vector<std::size_t>>> work(blocks.begin(), blocks.end());

  EnsembleTrajectories run;
  run.members.resize(ensemble.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_block = work.size();

  auto worker = [&] {
    for (std::size_t b = next++; b < work.size(); b = next++) {
      try {
        const auto& [key, indices] = work[b];
        const BasisSpec basis(key.first, key.second == 0 ? Parity::even : Parity::odd, j_max);
        const OneCycleOperator u =
            train.shape == PulseShape::delta
                ? one_cycle_operator(train, basis, spectrum)
                : finite_pulse_cycle_operator(train, basis, spectrum,
                                              default_pulse_step(train, basis, spectrum));
        for (std::size_t i : indices) {
          const WaveFunction psi0 = WaveFunction::basis_state(basis, ensemble.members()[i].j0);
          run.members[i] = propagate_train(psi0, u, train.pulses);
        }
      } catch (...) {
        // Report the failure of the lowest block so the outcome does not depend on timing.
        std::lock_guard lock(error_mutex);
        if (b < error_block) {
          error_block = b;
          error = std::current_exception();
        }
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(work.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);
  return run;
}

std::vector<std::vector<double>> ensemble_populations(const ThermalEnsemble& ensemble,
                                                      const EnsembleTrajectories& run) {
  std::vector<PopulationSeries> series;
  series.reserve(run.members.size());
  for (const auto& traj : run.members) {
    if (traj.empty()) throw std::invalid_argument("ensemble_populations: empty trajectory");
    PopulationSeries s{traj.front().basis(), {}};
    s.snapshots.reserve(traj.size());
    for (const auto& psi : traj) s.snapshots.push_back(populations(psi));
    series.push_back(std::move(s));
  }
  return ensemble_average(ensemble, series);
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_power_law: need >= 2 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_power_law: values must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const auto n = static_cast<double>(x.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, std::exp((sy - slope * sx) / n)};
}

double quadratic_prefactor(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("quadratic_prefactor: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x2 = x[i] * x[i];
    num += x2 * y[i];
    den += x2 * x2;
  }
  return num / den;
}

}  // namespace kickrot
