// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

#include "kickrot/run.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>
#include <utility>

#include "kickrot/error.hpp"
#include "kickrot/export.hpp"
#include "kickrot/floquet.hpp"
#include "kickrot/observables.hpp"

namespace kickrot {

namespace {

using nlohmann::json;

struct Output {
  std::vector<std::pair<std::string, Table>> tables;
  json resolved = json::object();
};

Table make_table(std::vector<std::string> columns, std::size_t keys) {
  Table t;
  t.columns = std::move(columns);
  t.key_columns = keys;
  return t;
}

Parity parity_of(int j) { return j % 2 == 0 ? Parity::even : Parity::odd; }

// Runs f(i) for i in [0, n) on up to `threads` threads.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = n;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);
}

Output run_states(const RunConfig& c) {
  const double p = c.kick_strength();
  const RotorSpectrum spectrum = c.spectrum.spectrum();
  Table levels = make_table({"P", "parity", "omega[rad]", "class", "lower_weight", "upper_weight"}, 3);
  Table profiles = make_table({"parity", "omega[rad]", "J", "population"}, 3);
  Table discrete = make_table({"P", "parity", "omega[rad]", "gap[rad]"}, 3);
  for (Parity parity : c.basis.parities) {
    const BasisSpec basis(c.basis.m, parity, c.basis.j_max);
    const auto set = classify_edge_states(quasienergy_decomposition(one_cycle_operator(c.train_spec(p), basis, spectrum)));
    for (const auto& e : set.entries()) {
      levels.add({p, to_string(parity), e.omega, to_string(e.cls), e.lower_weight, e.upper_weight});
      if (e.cls != StateClass::edge) continue;
      for (std::size_t i = 0; i < basis.dimension(); ++i) {
        profiles.add({to_string(parity), e.omega, std::int64_t{basis.j_at(i)},
                      std::norm(e.vector[static_cast<Eigen::Index>(i)])});
      }
    }
    for (const auto& d : discrete_edge_levels(set)) discrete.add({p, to_string(parity), d.omega, d.gap});
  }
  Output out;
  out.tables.emplace_back("quasienergies.tsv", std::move(levels));
  out.tables.emplace_back("edge_profiles.tsv", std::move(profiles));
  out.tables.emplace_back("discrete_levels.tsv", std::move(discrete));
  out.resolved["P"] = p;
  return out;
}

Output run_spectrum_scan(const RunConfig& c) {
  const RotorSpectrum spectrum = c.spectrum.spectrum();
  Table levels = make_table({"P", "parity", "omega[rad]", "class"}, 3);
  Table hist = make_table({"P", "parity", "omega_bin_center[rad]", "count"}, 3);
  Table errors = make_table({"P", "parity", "message"}, 2);
  for (Parity parity : c.basis.parities) {
    const BasisSpec basis(c.basis.m, parity, c.basis.j_max);
    const ScanResult r = spectrum_scan(c.train.kick_strengths, c.train.tau_fraction, basis, spectrum,
                                       {c.sampling.omega_bins, c.threads});
    for (const auto& point : r.points) {
      if (point.error) errors.add({point.kick_strength, to_string(parity), *point.error});
      for (const auto& l : point.levels) levels.add({point.kick_strength, to_string(parity), l.omega, to_string(l.cls)});
    }
    for (std::size_t i = 0; i < r.histogram.kick_strengths.size(); ++i) {
      for (std::size_t b = 0; b < r.histogram.omega_bins; ++b) {
        hist.add({r.histogram.kick_strengths[i], to_string(parity), r.histogram.bin_center(b),
                  std::int64_t{r.histogram.counts[i][b]}});
      }
    }
  }
  Output out;
  out.tables.emplace_back("quasienergies.tsv", std::move(levels));
  out.tables.emplace_back("density.tsv", std::move(hist));
  out.tables.emplace_back("scan_errors.tsv", std::move(errors));
  return out;
}

Output run_dynamics(const RunConfig& c) {
  const double p = c.kick_strength();
  const RotorSpectrum spectrum = c.spectrum.spectrum();
  const PulseTrainSpec train = c.train_spec(p);
  Output out;
  out.resolved["P"] = p;
  if (train.shape == PulseShape::gaussian) out.resolved["fwhm"] = train.fwhm;

  if (c.temperature_k) {
    const ThermalEnsemble ensemble = thermal_ensemble(*c.temperature_k, c.spectrum.has_molecule() ? c.spectrum.bridge() : UnitBridge(1.0), spectrum);
    const EnsembleTrajectories traj = propagate_ensemble(ensemble, c.basis.j_max, train, spectrum, c.threads);
    const auto pops = ensemble_populations(ensemble, traj);
    Table pop = make_table({"pulse_index", "J", "population"}, 2);
    Table energy = make_table({"N", "energy[reduced]", "mean_J"}, 1);
    for (std::size_t n = 0; n < pops.size(); ++n) {
      double e = 0.0;
      double mj = 0.0;
      for (std::size_t j = 0; j < pops[n].size(); ++j) {
        pop.add({static_cast<std::int64_t>(n), static_cast<std::int64_t>(j), pops[n][j]});
        e += spectrum.energy(static_cast<int>(j)) * pops[n][j];
        mj += static_cast<double>(j) * pops[n][j];
      }
      energy.add({static_cast<std::int64_t>(n), e, mj});
    }
    out.tables.emplace_back("populations.tsv", std::move(pop));
    out.tables.emplace_back("energy.tsv", std::move(energy));
    out.resolved["ensemble_members"] = ensemble.size();
    return out;
  }

  Table pop = make_table({"J0", "pulse_index", "J", "population"}, 3);
  Table energy = make_table({"J0", "N", "energy[reduced]", "mean_J", "fidelity"}, 2);
  std::vector<std::vector<WaveFunction>> runs(c.initial_j.size());
  parallel_for(c.initial_j.size(), c.threads, [&](std::size_t i) {
    const BasisSpec basis(c.basis.m, parity_of(c.initial_j[i]), c.basis.j_max);
    runs[i] = propagate_train(WaveFunction::basis_state(basis, c.initial_j[i]), train, spectrum);
  });
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto j0 = static_cast<std::int64_t>(c.initial_j[i]);
    for (std::size_t n = 0; n < runs[i].size(); ++n) {
      const WaveFunction& psi = runs[i][n];
      const auto pv = populations(psi);
      for (std::size_t k = 0; k < pv.size(); ++k) {
        pop.add({j0, static_cast<std::int64_t>(n), std::int64_t{psi.basis().j_at(k)}, pv[k]});
      }
      energy.add({j0, static_cast<std::int64_t>(n), rotational_energy(psi, spectrum), mean_j(psi),
                  runs[i].front().fidelity(psi)});
    }
  }
  out.tables.emplace_back("populations.tsv", std::move(pop));
  out.tables.emplace_back("energy.tsv", std::move(energy));
  return out;
}

Output run_overlap_scan(const RunConfig& c) {
  const RotorSpectrum spectrum = c.spectrum.spectrum();
  Table table = make_table({"J0", "P", "overlap"}, 2);
  for (Parity parity : c.basis.parities) {
    std::vector<int> starts;
    for (int j : c.initial_j) {
      if (parity_of(j) == parity) starts.push_back(j);
    }
    if (starts.empty()) continue;
    const BasisSpec basis(c.basis.m, parity, c.basis.j_max);
    const KickPropagator kick(cos2_matrix(basis));
    const auto& grid = c.train.kick_strengths;
    std::vector<std::vector<double>> overlaps(grid.size());
    parallel_for(grid.size(), c.threads, [&](std::size_t i) {
      const auto set = classify_edge_states(quasienergy_decomposition(one_cycle_operator(c.train_spec(grid[i]), kick, spectrum)));
      for (int j : starts) overlaps[i].push_back(edge_overlap(WaveFunction::basis_state(basis, j), set).overlap);
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t k = 0; k < starts.size(); ++k) table.add({std::int64_t{starts[k]}, grid[i], overlaps[i][k]});
    }
  }
  Output out;
  out.tables.emplace_back("overlap.tsv", std::move(table));
  return out;
}

Output run_alignment_ft(const RunConfig& c) {
  const double p = c.kick_strength();
  const RotorSpectrum spectrum = c.spectrum.spectrum();
  const PulseTrainSpec train = c.train_spec(p);
  const std::optional<UnitBridge> bridge =
      c.spectrum.has_molecule() ? std::optional<UnitBridge>(c.spectrum.bridge()) : std::nullopt;

  std::optional<ThermalEnsemble> ensemble;
  if (c.temperature_k) {
    ensemble.emplace(thermal_ensemble(*c.temperature_k, bridge.value_or(UnitBridge(1.0)), spectrum));
  } else {
    std::vector<EnsembleMember> members;
    for (int j : c.initial_j) members.push_back({j, c.basis.m, 1.0 / static_cast<double>(c.initial_j.size())});
    ensemble.emplace(std::move(members), 0.0);
  }
  PulseTrainSpec longest = train;
  longest.pulses = *std::max_element(c.sampling.pulse_counts.begin(), c.sampling.pulse_counts.end());
  const EnsembleTrajectories traj = propagate_ensemble(*ensemble, c.basis.j_max, longest, spectrum, c.threads);

  const double window = c.sampling.window_trev * kRevivalTime;
  const double broadening = c.sampling.broadening ? *c.sampling.broadening : bridge->to_reduced_energy(c.sampling.broadening_cm);
  std::map<std::pair<int, int>, CouplingMatrix> couplings;
  for (const auto& m : ensemble->members()) {
    const std::pair<int, int> key{std::abs(m.m), m.j0 % 2};
    if (!couplings.contains(key)) {
      couplings.emplace(key, cos2_matrix(BasisSpec(key.first, m.parity(), c.basis.j_max)));
    }
  }

  Table trace_table = make_table({"N", "t[reduced]", "alignment"}, 2);
  Table spec_table = make_table({"N", bridge ? "frequency[cm^-1]" : "frequency[reduced]", "magnitude"}, 2);
  std::vector<int> counts = c.sampling.pulse_counts;
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  for (int n : counts) {
    std::size_t samples = 2;
    for (const auto& member : traj.members) {
      const auto& psi = member[static_cast<std::size_t>(n)];
      const double nyquist = static_cast<double>(nyquist_samples(psi, spectrum, window) - 1);
      samples = std::max(samples, static_cast<std::size_t>(std::ceil(c.sampling.oversampling * nyquist)) + 1);
    }
    std::vector<double> total(samples, 0.0);
    AlignmentTrace sum;
    for (std::size_t i = 0; i < traj.members.size(); ++i) {
      const auto& m = ensemble->members()[i];
      const auto& psi = traj.members[i][static_cast<std::size_t>(n)];
      const AlignmentTrace t = alignment_trace(psi, spectrum, couplings.at({std::abs(m.m), m.j0 % 2}), window, samples, n);
      for (std::size_t k = 0; k < samples; ++k) total[k] += m.weight * t.values[k];
      if (i == 0) sum = t;
    }
    sum.values = std::move(total);
    const AlignmentSpectrum s = alignment_spectrum(sum, broadening, {c.sampling.zero_padding, bridge});
    for (std::size_t k = 0; k < samples; ++k) {
      trace_table.add({std::int64_t{n}, sum.dt * static_cast<double>(k), sum.values[k]});
    }
    for (std::size_t k = 0; k < s.frequencies.size(); ++k) {
      spec_table.add({std::int64_t{n}, s.frequencies[k], s.magnitudes[k]});
    }
  }
  Output out;
  out.tables.emplace_back("alignment_trace.tsv", std::move(trace_table));
  out.tables.emplace_back("alignment_spectrum.tsv", std::move(spec_table));
  out.resolved["P"] = p;
  out.resolved["broadening"] = broadening;
  out.resolved["ensemble_members"] = ensemble->size();
  if (train.shape == PulseShape::gaussian) out.resolved["fwhm"] = train.fwhm;
  return out;
}

Output run_planar_ref(const RunConfig& c) {
  Table table = make_table({"P", "omega[rad]"}, 2);
  for (double p : c.train.kick_strengths) {
    for (double w : planar_reference_spectrum(p, c.train.tau_fraction, c.sampling.planar_grid)) table.add({p, w});
  }
  Output out;
  out.tables.emplace_back("planar_quasienergies.tsv", std::move(table));
  return out;
}

}  // namespace

RunResult run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();

  Output out;
  switch (config.scenario) {
    case Scenario::states:
      out = run_states(config);
      break;
    case Scenario::spectrum_scan:
      out = run_spectrum_scan(config);
      break;
    case Scenario::dynamics:
      out = run_dynamics(config);
      break;
    case Scenario::overlap_scan:
      out = run_overlap_scan(config);
      break;
    case Scenario::alignment_ft:
      out = run_alignment_ft(config);
      break;
    case Scenario::planar_ref:
      out = run_planar_ref(config);
      break;
  }

  std::filesystem::create_directories(config.output);
  RunResult result;
  json files = json::array();
  for (auto& [name, table] : out.tables) {
    const auto path = config.output / name;
    write_table(path, std::move(table));
    result.files.push_back(path);
    files.push_back(name);
  }
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest;
  manifest["version"] = kLibraryVersion;
  manifest["config"] = json::parse(to_json(config));
  out.resolved["epsilon"] = config.spectrum.spectrum().epsilon();
  manifest["resolved"] = out.resolved;
  manifest["files"] = files;
  manifest["wall_time_s"] = result.wall_time_s;
  const auto path = config.output / "manifest.json";
  write_text(path, manifest.dump(2) + "\n");
  result.files.push_back(path);
  return result;
}

}  // namespace kickrot
