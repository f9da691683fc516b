// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

#include "kickrot/run_config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kickrot/error.hpp"

namespace kickrot {

namespace {

using nlohmann::json;

constexpr double kFemtosecond = 1e-15;

void reject_unknown(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError(prefix.empty() ? key : prefix + "." + key, "unknown key");
    }
  }
}

const json* member(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

int get_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  return v.get<int>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

json require_object(const json& v, const std::string& key) {
  if (!v.is_object()) throw ConfigError(key, "expected an object");
  return v;
}

// Re-labels library errors with the dotted configuration key.
template <typename F>
auto with_key(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    const std::string prefix = e.key() + ": ";
    throw ConfigError(key, what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what);
  }
}

std::vector<double> grid_from_json(const json& v, const std::string& key) {
  if (v.is_string()) return parse_grid(v.get<std::string>(), key);
  if (!v.is_array()) throw ConfigError(key, "expected an array of numbers or \"start:stop:step\"");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(get_number(x, key));
  return out;
}

bool needs_grid(Scenario s) {
  return s == Scenario::spectrum_scan || s == Scenario::overlap_scan;
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::states:
      return "states";
    case Scenario::spectrum_scan:
      return "spectrum-scan";
    case Scenario::dynamics:
      return "dynamics";
    case Scenario::overlap_scan:
      return "overlap-scan";
    case Scenario::alignment_ft:
      return "alignment-ft";
    case Scenario::planar_ref:
      return "planar-ref";
  }
  return "states";
}

Scenario scenario_from_string(const std::string& text) {
  for (Scenario s : {Scenario::states, Scenario::spectrum_scan, Scenario::dynamics, Scenario::overlap_scan,
                     Scenario::alignment_ft, Scenario::planar_ref}) {
    if (to_string(s) == text) return s;
  }
  throw ConfigError("scenario", "unknown scenario '" + text + "'");
}

std::vector<double> parse_grid(const std::string& text, const std::string& key) {
  auto number = [&](std::string_view part) {
    double v = 0.0;
    const auto* end = part.data() + part.size();
    auto [ptr, ec] = std::from_chars(part.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError(key, "cannot parse '" + std::string(part) + "'");
    return v;
  };
  std::vector<std::string_view> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::string_view rest = text;
  while (true) {
    const auto pos = rest.find(sep);
    parts.push_back(rest.substr(0, pos));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  std::vector<double> out;
  if (sep == ',') {
    if (text.empty()) return out;
    for (auto p : parts) out.push_back(number(p));
    return out;
  }
  if (parts.size() != 3) throw ConfigError(key, "range must be start:stop:step");
  const double start = number(parts[0]);
  const double stop = number(parts[1]);
  const double step = number(parts[2]);
  if (!(step > 0.0) || !(stop >= start)) throw ConfigError(key, "range needs step > 0 and stop >= start");
  // Integer point count; the small allowance keeps the endpoint despite rounding.
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

UnitBridge SpectrumConfig::bridge() const {
  if (!b_cm) throw ConfigError("spectrum.B_cm", "molecular constants are required for this run");
  return with_key("spectrum", [&] { return UnitBridge(*b_cm, d_cm.value_or(0.0), delta_alpha_a3); });
}

RotorSpectrum SpectrumConfig::spectrum() const {
  if (b_cm) return bridge().spectrum();
  return with_key("spectrum.epsilon", [&] { return RotorSpectrum(epsilon); });
}

double RunConfig::kick_strength() const {
  if (train.peak_intensity_w_cm2) {
    if (!train.fwhm_fs) throw ConfigError("train.fwhm_fs", "pulse duration needed with peak_intensity_W_cm2");
    const UnitBridge b = spectrum.bridge();
    return with_key("train", [&] {
      return kick_strength_from_pulse(b, *train.peak_intensity_w_cm2, *train.fwhm_fs * kFemtosecond);
    });
  }
  if (train.kick_strengths.size() != 1) throw ConfigError("train.P", "exactly one kick strength expected");
  return train.kick_strengths.front();
}

double RunConfig::fwhm_reduced() const {
  if (train.fwhm) return *train.fwhm;
  if (train.fwhm_fs) return spectrum.bridge().to_reduced_time(*train.fwhm_fs * kFemtosecond);
  throw ConfigError("train.fwhm", "Gaussian pulses need fwhm (reduced) or fwhm_fs");
}

PulseTrainSpec RunConfig::train_spec(double p) const {
  PulseTrainSpec spec{p, train.tau_fraction, train.pulses, train.shape, 0.0};
  if (train.shape == PulseShape::gaussian) spec.fwhm = fwhm_reduced();
  with_key("train", [&] {
    spec.validate();
    return 0;
  });
  return spec;
}

void RunConfig::validate() const {
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  if (output.empty()) throw ConfigError("output", "output directory must not be empty");

  // Kick strengths.
  if (train.peak_intensity_w_cm2) {
    if (needs_grid(scenario)) throw ConfigError("train.peak_intensity_W_cm2", "not allowed for P scans");
    if (!train.kick_strengths.empty()) {
      throw ConfigError("train.P", "give either P or peak_intensity_W_cm2, not both");
    }
    static_cast<void>(kick_strength());
  } else {
    if (train.kick_strengths.empty()) throw ConfigError("train.P_grid", "no kick strengths given");
    for (double p : train.kick_strengths) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("train.P", "kick strengths must be finite and >= 0");
    }
    if (needs_grid(scenario)) {
      if (train.kick_strengths.size() < 2) throw ConfigError("train.P_grid", "a scan needs at least two points");
      for (std::size_t i = 1; i < train.kick_strengths.size(); ++i) {
        if (!(train.kick_strengths[i] > train.kick_strengths[i - 1])) {
          throw ConfigError("train.P_grid", "kick strengths must be strictly ascending");
        }
      }
    } else if (scenario != Scenario::planar_ref && train.kick_strengths.size() != 1) {
      throw ConfigError("train.P", "this scenario takes a single kick strength");
    }
  }
  if (train.pulses < 1) throw ConfigError("train.N", "pulse count must be >= 1");
  if (train.shape == PulseShape::gaussian) {
    if (scenario != Scenario::dynamics && scenario != Scenario::alignment_ft) {
      throw ConfigError("train.shape", "Gaussian pulses are supported by dynamics and alignment-ft only");
    }
    static_cast<void>(train_spec(1.0));
  }

  // Spectrum and grid.
  const RotorSpectrum rotor = spectrum.spectrum();
  if (scenario != Scenario::planar_ref) {
    if (basis.parities.empty()) throw ConfigError("basis.parity", "no parity selected");
    for (Parity p : basis.parities) {
      const BasisSpec b = with_key("basis.J_max", [&] { return BasisSpec(basis.m, p, basis.j_max); });
      with_key("spectrum.epsilon", [&] {
        rotor.check_grid(b);
        return 0;
      });
      if (scenario == Scenario::states || scenario == Scenario::spectrum_scan ||
          scenario == Scenario::overlap_scan) {
        if (b.j_min() + kEdgeWindowJ > b.j_max() - kEdgeWindowJ + 1) {
          throw ConfigError("basis.J_max", "too small: the two 40-J edge windows overlap");
        }
      }
    }
  } else if (sampling.planar_grid < 1) {
    throw ConfigError("sampling.planar_grid", "must be >= 1");
  }

  if (scenario == Scenario::spectrum_scan && sampling.omega_bins < 1) {
    throw ConfigError("sampling.omega_bins", "must be >= 1");
  }

  if (temperature_k) {
    if (!(*temperature_k >= 0.0)) throw ConfigError("temperature_K", "must be >= 0");
    if (scenario != Scenario::dynamics && scenario != Scenario::alignment_ft) {
      throw ConfigError("temperature_K", "thermal ensembles apply to dynamics and alignment-ft only");
    }
    if (*temperature_k > 0.0 && !spectrum.has_molecule()) {
      throw ConfigError("spectrum.B_cm", "a thermal ensemble needs the rotational constant");
    }
  }

  if (scenario == Scenario::dynamics || scenario == Scenario::overlap_scan ||
      (scenario == Scenario::alignment_ft && !temperature_k)) {
    if (initial_j.empty()) throw ConfigError("initial_J", "no initial states given");
    for (int j : initial_j) {
      if (j < std::abs(basis.m) || j > basis.j_max) {
        throw ConfigError("initial_J", "J0 = " + std::to_string(j) + " is outside [|M|, J_max]");
      }
      if (scenario == Scenario::overlap_scan) {
        const Parity p = j % 2 == 0 ? Parity::even : Parity::odd;
        if (std::find(basis.parities.begin(), basis.parities.end(), p) == basis.parities.end()) {
          throw ConfigError("initial_J", "J0 = " + std::to_string(j) + " has a parity not selected in basis.parity");
        }
      }
    }
  }

  if (scenario == Scenario::alignment_ft) {
    if (sampling.pulse_counts.empty()) throw ConfigError("sampling.pulse_counts", "no pulse counts given");
    for (int n : sampling.pulse_counts) {
      if (n < 1 || n > train.pulses) {
        throw ConfigError("sampling.pulse_counts", "counts must lie in [1, train.N]");
      }
    }
    if (!(sampling.window_trev > 0.0)) throw ConfigError("sampling.window_trev", "must be positive");
    if (!(sampling.oversampling >= 1.0)) throw ConfigError("sampling.oversampling", "must be >= 1");
    if (sampling.zero_padding < 1) throw ConfigError("sampling.zero_padding", "must be >= 1");
    if (sampling.broadening) {
      if (!(*sampling.broadening > 0.0)) throw ConfigError("sampling.broadening", "must be positive");
    } else {
      if (!(sampling.broadening_cm > 0.0)) throw ConfigError("sampling.broadening_cm", "must be positive");
      if (!spectrum.has_molecule()) {
        throw ConfigError("spectrum.B_cm", "broadening_cm needs the rotational constant (or give sampling.broadening)");
      }
    }
  }
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
  reject_unknown(doc, "", {"scenario", "output", "threads", "basis", "train", "spectrum", "temperature_K",
                           "initial_J", "sampling"});

  RunConfig c;
  if (auto* v = member(doc, "scenario")) c.scenario = scenario_from_string(get_string(*v, "scenario"));
  if (auto* v = member(doc, "output")) c.output = get_string(*v, "output");
  if (auto* v = member(doc, "threads")) {
    const int t = get_int(*v, "threads");
    if (t < 1) throw ConfigError("threads", "must be >= 1");
    c.threads = static_cast<unsigned>(t);
  }

  if (auto* v = member(doc, "basis")) {
    const json b = require_object(*v, "basis");
    reject_unknown(b, "basis", {"M", "parity", "J_max"});
    if (auto* x = member(b, "M")) c.basis.m = get_int(*x, "basis.M");
    if (auto* x = member(b, "J_max")) c.basis.j_max = get_int(*x, "basis.J_max");
    if (auto* x = member(b, "parity")) {
      const std::string p = get_string(*x, "basis.parity");
      if (p == "both") {
        c.basis.parities = {Parity::even, Parity::odd};
      } else {
        c.basis.parities = {with_key("basis.parity", [&] { return parity_from_string(p); })};
      }
    }
  }

  if (auto* v = member(doc, "train")) {
    const json t = require_object(*v, "train");
    reject_unknown(t, "train", {"P", "P_grid", "tau", "N", "shape", "fwhm", "fwhm_fs", "peak_intensity_W_cm2"});
    c.train.kick_strengths.clear();
    if (member(t, "P") && member(t, "P_grid")) throw ConfigError("train.P_grid", "give either P or P_grid");
    if (auto* x = member(t, "P")) c.train.kick_strengths = {get_number(*x, "train.P")};
    if (auto* x = member(t, "P_grid")) c.train.kick_strengths = grid_from_json(*x, "train.P_grid");
    if (auto* x = member(t, "tau")) {
      const std::string s = x->is_number_integer() ? std::to_string(x->get<long long>()) : get_string(*x, "train.tau");
      c.train.tau_fraction = with_key("train.tau", [&] { return Rational::parse(s); });
    }
    if (auto* x = member(t, "N")) c.train.pulses = get_int(*x, "train.N");
    if (auto* x = member(t, "shape")) {
      const std::string s = get_string(*x, "train.shape");
      if (s == "delta") {
        c.train.shape = PulseShape::delta;
      } else if (s == "gaussian") {
        c.train.shape = PulseShape::gaussian;
      } else {
        throw ConfigError("train.shape", "expected 'delta' or 'gaussian'");
      }
    }
    if (auto* x = member(t, "fwhm")) c.train.fwhm = get_number(*x, "train.fwhm");
    if (auto* x = member(t, "fwhm_fs")) c.train.fwhm_fs = get_number(*x, "train.fwhm_fs");
    if (auto* x = member(t, "peak_intensity_W_cm2")) {
      c.train.peak_intensity_w_cm2 = get_number(*x, "train.peak_intensity_W_cm2");
    }
  }

  if (auto* v = member(doc, "spectrum")) {
    const json s = require_object(*v, "spectrum");
    reject_unknown(s, "spectrum", {"epsilon", "B_cm", "D_cm", "delta_alpha_A3"});
    if (auto* x = member(s, "epsilon")) c.spectrum.epsilon = get_number(*x, "spectrum.epsilon");
    if (auto* x = member(s, "B_cm")) c.spectrum.b_cm = get_number(*x, "spectrum.B_cm");
    if (auto* x = member(s, "D_cm")) c.spectrum.d_cm = get_number(*x, "spectrum.D_cm");
    if (auto* x = member(s, "delta_alpha_A3")) c.spectrum.delta_alpha_a3 = get_number(*x, "spectrum.delta_alpha_A3");
    if (member(s, "epsilon") && c.spectrum.b_cm) {
      throw ConfigError("spectrum.epsilon", "give either epsilon or molecular constants, not both");
    }
  }

  if (auto* v = member(doc, "temperature_K")) c.temperature_k = get_number(*v, "temperature_K");
  if (auto* v = member(doc, "initial_J")) {
    c.initial_j.clear();
    if (v->is_number_integer()) {
      c.initial_j.push_back(v->get<int>());
    } else {
      if (!v->is_array()) throw ConfigError("initial_J", "expected an integer or an array of integers");
      for (const auto& x : *v) c.initial_j.push_back(get_int(x, "initial_J"));
    }
  }

  if (auto* v = member(doc, "sampling")) {
    const json s = require_object(*v, "sampling");
    reject_unknown(s, "sampling", {"omega_bins", "window_trev", "oversampling", "broadening_cm", "broadening",
                                   "zero_padding", "pulse_counts", "planar_grid"});
    auto count = [&](const char* key) {
      const int n = get_int(s.at(key), std::string("sampling.") + key);
      if (n < 1) throw ConfigError(std::string("sampling.") + key, "must be >= 1");
      return static_cast<std::size_t>(n);
    };
    if (member(s, "omega_bins")) c.sampling.omega_bins = count("omega_bins");
    if (member(s, "zero_padding")) c.sampling.zero_padding = count("zero_padding");
    if (auto* x = member(s, "window_trev")) c.sampling.window_trev = get_number(*x, "sampling.window_trev");
    if (auto* x = member(s, "oversampling")) c.sampling.oversampling = get_number(*x, "sampling.oversampling");
    if (auto* x = member(s, "broadening_cm")) c.sampling.broadening_cm = get_number(*x, "sampling.broadening_cm");
    if (auto* x = member(s, "broadening")) c.sampling.broadening = get_number(*x, "sampling.broadening");
    if (auto* x = member(s, "planar_grid")) c.sampling.planar_grid = get_int(*x, "sampling.planar_grid");
    if (auto* x = member(s, "pulse_counts")) {
      if (!x->is_array()) throw ConfigError("sampling.pulse_counts", "expected an array of integers");
      c.sampling.pulse_counts.clear();
      for (const auto& n : *x) c.sampling.pulse_counts.push_back(get_int(n, "sampling.pulse_counts"));
    }
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

std::string to_json(const RunConfig& c) {
  json doc;
  doc["scenario"] = to_string(c.scenario);
  doc["output"] = c.output.string();
  doc["threads"] = c.threads;

  const std::string parity = c.basis.parities.size() == 2 ? "both" : to_string(c.basis.parities.front());
  doc["basis"] = {{"M", c.basis.m}, {"J_max", c.basis.j_max}, {"parity", parity}};

  json train = {{"P_grid", c.train.kick_strengths},
                {"tau", c.train.tau_fraction.str()},
                {"N", c.train.pulses},
                {"shape", to_string(c.train.shape)}};
  if (c.train.fwhm) train["fwhm"] = *c.train.fwhm;
  if (c.train.fwhm_fs) train["fwhm_fs"] = *c.train.fwhm_fs;
  if (c.train.peak_intensity_w_cm2) train["peak_intensity_W_cm2"] = *c.train.peak_intensity_w_cm2;
  doc["train"] = train;

  json spectrum = json::object();
  if (c.spectrum.b_cm) {
    spectrum["B_cm"] = *c.spectrum.b_cm;
  } else {
    spectrum["epsilon"] = c.spectrum.epsilon;
  }
  if (c.spectrum.d_cm) spectrum["D_cm"] = *c.spectrum.d_cm;
  if (c.spectrum.delta_alpha_a3) spectrum["delta_alpha_A3"] = *c.spectrum.delta_alpha_a3;
  doc["spectrum"] = spectrum;

  if (c.temperature_k) doc["temperature_K"] = *c.temperature_k;
  doc["initial_J"] = c.initial_j;

  json sampling = {{"omega_bins", c.sampling.omega_bins},
                   {"window_trev", c.sampling.window_trev},
                   {"oversampling", c.sampling.oversampling},
                   {"broadening_cm", c.sampling.broadening_cm},
                   {"zero_padding", c.sampling.zero_padding},
                   {"pulse_counts", c.sampling.pulse_counts},
                   {"planar_grid", c.sampling.planar_grid}};
  if (c.sampling.broadening) sampling["broadening"] = *c.sampling.broadening;
  doc["sampling"] = sampling;
  return doc.dump(2);
}

}  // namespace kickrot
