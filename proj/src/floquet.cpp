// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

#include "kickrot/floquet.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include "kickrot/error.hpp"

namespace kickrot {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kResidualLimit = 1e-8;
}  // namespace

std::string to_string(StateClass c) {
  switch (c) {
    case StateClass::extended:
      return "extended";
    case StateClass::edge:
      return "edge";
    case StateClass::artifact:
      return "artifact";
  }
  return "extended";
}

QuasienergySet::QuasienergySet(std::vector<QuasienergyState> entries, BasisSpec basis,
                               PulseTrainSpec train, RotorSpectrum spectrum, bool classified)
    : entries_(std::move(entries)), basis_(basis), train_(train), spectrum_(spectrum), classified_(classified) {}

std::size_t QuasienergySet::count(StateClass c) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [c](const auto& e) { return e.cls == c; }));
}

std::vector<double> QuasienergySet::omegas(std::optional<StateClass> only) const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    if (!only || e.cls == *only) out.push_back(e.omega);
  }
  return out;
}

double wrap_quasienergy(double omega) {
  double w = std::remainder(omega, 2.0 * kPi);  // [-pi, pi]
  if (w >= kPi) w -= 2.0 * kPi;
  return w;
}

NormalEigensystem normal_eigensystem(const Eigen::MatrixXcd& u) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u, true);
  if (schur.info() != Eigen::Success) {
    throw NumericalError("quasienergy decomposition: Schur iteration did not converge");
  }
  return {schur.matrixT().diagonal(), schur.matrixU()};
}

QuasienergySet quasienergy_decomposition(const OneCycleOperator& op) {
  const Eigen::MatrixXcd& u = op.matrix();
  const auto n = u.rows();
  NormalEigensystem eig = normal_eigensystem(u);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> omega(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) omega[k] = wrap_quasienergy(-std::arg(eig.eigenvalues[k]));
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return omega[a] < omega[b]; });

  std::vector<QuasienergyState> entries;
  entries.reserve(static_cast<std::size_t>(n));
  for (auto k : order) entries.push_back({omega[k], eig.eigenvectors.col(k), StateClass::extended, 0, 0});

  // Re-orthonormalize clusters of (nearly) degenerate quasienergies.
  std::size_t start = 0;
  while (start < entries.size()) {
    std::size_t end = start + 1;
    while (end < entries.size() && entries[end].omega - entries[end - 1].omega < kDegeneracyThreshold) ++end;
    for (std::size_t a = start; a < end; ++a) {
      for (std::size_t b = start; b < a; ++b) {
        entries[a].vector -= entries[b].vector.dot(entries[a].vector) * entries[b].vector;
      }
      entries[a].vector.normalize();
    }
    start = end;
  }

  double worst = 0.0;
  std::size_t worst_index = 0;
  for (std::size_t a = 0; a < entries.size(); ++a) {
    const auto& v = entries[a].vector;
    const double r = (u * v - std::polar(1.0, -entries[a].omega) * v).norm();
    if (r > worst) {
      worst = r;
      worst_index = a;
    }
  }
  if (worst > kResidualLimit) {
    throw NumericalError("quasienergy decomposition: eigenvector residual " + std::to_string(worst) +
                         " at omega = " + std::to_string(entries[worst_index].omega));
  }
  return {std::move(entries), op.basis(), op.train(), op.spectrum()};
}

QuasienergySet classify_edge_states(QuasienergySet set) {
  const BasisSpec& basis = set.basis();
  if (basis.j_min() + kEdgeWindowJ > basis.j_max() - kEdgeWindowJ + 1) {
    throw ConfigError("J_max", "grid J = " + std::to_string(basis.j_min()) + ".." +
                                   std::to_string(basis.j_max()) +
                                   " too small: lower and upper 40-J windows overlap");
  }
  for (auto& e : set.entries()) {
    double lower = 0.0;
    double upper = 0.0;
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
      const int j = basis.j_at(i);
      const double w = std::norm(e.vector[static_cast<Eigen::Index>(i)]);
      if (j < basis.j_min() + kEdgeWindowJ) lower += w;
      if (j > basis.j_max() - kEdgeWindowJ) upper += w;
    }
    e.lower_weight = lower;
    e.upper_weight = upper;
    if (upper > kArtifactThreshold) {
      e.cls = StateClass::artifact;
    } else if (lower > kEdgeLowerThreshold && upper < kEdgeUpperThreshold) {
      e.cls = StateClass::edge;
    } else {
      e.cls = StateClass::extended;
    }
  }
  set.mark_classified();
  return set;
}

OverlapReport edge_overlap(const WaveFunction& psi0, const QuasienergySet& set) {
  if (!set.classified()) throw std::invalid_argument("edge_overlap: quasienergy set is not classified");
  if (!(psi0.basis() == set.basis())) throw std::invalid_argument("edge_overlap: grid mismatch");
  OverlapReport report;
  Eigen::Index dominant = 0;
  psi0.coeffs().cwiseAbs2().maxCoeff(&dominant);
  report.j0 = set.basis().j_at(static_cast<std::size_t>(dominant));
  report.m = set.basis().m();
  report.kick_strength = set.train().kick_strength;
  for (std::size_t a = 0; a < set.size(); ++a) {
    if (set[a].cls != StateClass::edge) continue;
    const double w = std::norm(set[a].vector.dot(psi0.coeffs()));
    report.contributions.push_back({a, set[a].omega, w});
    report.overlap += w;
  }
  return report;
}

WaveFunction reconstruct_from_quasienergies(const WaveFunction& psi0, const QuasienergySet& set,
                                            int cycles) {
  if (!(psi0.basis() == set.basis())) throw std::invalid_argument("reconstruct: grid mismatch");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi0.coeffs().size());
  for (const auto& e : set.entries()) {
    const std::complex<double> c = e.vector.dot(psi0.coeffs());
    out += c * std::polar(1.0, -e.omega * cycles) * e.vector;
  }
  return {psi0.basis(), std::move(out), psi0.time() + cycles * set.train().period()};
}

std::vector<Band> find_bands(std::vector<double> omegas, double max_gap) {
  std::vector<Band> bands;
  if (omegas.empty()) return bands;
  std::sort(omegas.begin(), omegas.end());
  const std::size_t n = omegas.size();
  auto gap_after = [&](std::size_t i) {
    return i + 1 < n ? omegas[i + 1] - omegas[i] : omegas[0] + 2.0 * kPi - omegas[n - 1];
  };
  // Start right after a large gap so that wrapped bands stay in one piece.
  std::size_t start = n;
  for (std::size_t i = n; i-- > 0;) {
    if (gap_after(i) >= max_gap) {
      start = (i + 1) % n;
      break;
    }
  }
  if (start == n) {
    bands.push_back({omegas.front(), omegas.back(), 2.0 * kPi, n});
    return bands;
  }
  Band cur{omegas[start], omegas[start], 0.0, 1};
  for (std::size_t step = 0; step + 1 < n; ++step) {
    const std::size_t i = (start + step) % n;
    const std::size_t next = (i + 1) % n;
    const double g = gap_after(i);
    if (g < max_gap) {
      cur.upper = omegas[next];
      cur.width += g;
      ++cur.count;
    } else {
      bands.push_back(cur);
      cur = {omegas[next], omegas[next], 0.0, 1};
    }
  }
  bands.push_back(cur);
  return bands;
}

std::vector<Band> spectral_bands(const QuasienergySet& set, double max_gap) {
  std::vector<double> physical;
  for (const auto& e : set.entries()) {
    if (e.cls != StateClass::artifact) physical.push_back(e.omega);
  }
  std::vector<Band> bands = find_bands(std::move(physical), max_gap);
  std::erase_if(bands, [](const Band& b) { return b.count < 2; });
  return bands;
}

std::vector<DiscreteLevel> discrete_edge_levels(const QuasienergySet& set) {
  if (!set.classified()) throw std::invalid_argument("discrete_edge_levels: set is not classified");
  const double spacing = 2.0 * kPi / static_cast<double>(set.size());
  const std::vector<double> extended = set.omegas(StateClass::extended);
  std::vector<DiscreteLevel> out;
  for (std::size_t a = 0; a < set.size(); ++a) {
    if (set[a].cls != StateClass::edge) continue;
    double gap = 2.0 * kPi;
    for (double w : extended) gap = std::min(gap, std::abs(wrap_quasienergy(set[a].omega - w)));
    if (gap > spacing) out.push_back({a, set[a].omega, gap});
  }
  return out;
}

double DensityHistogram::bin_center(std::size_t bin) const {
  const double width = 2.0 * kPi / static_cast<double>(omega_bins);
  return -kPi + (static_cast<double>(bin) + 0.5) * width;
}

ScanResult spectrum_scan(std::span<const double> kick_strengths, Rational tau_fraction,
                         const BasisSpec& basis, const RotorSpectrum& spectrum, const ScanOptions& options) {
  if (kick_strengths.size() < 2) throw ConfigError("P_grid", "need at least two kick strengths");
  if (!std::is_sorted(kick_strengths.begin(), kick_strengths.end()) ||
      std::adjacent_find(kick_strengths.begin(), kick_strengths.end()) != kick_strengths.end()) {
    throw ConfigError("P_grid", "kick strengths must be strictly ascending");
  }
  if (options.omega_bins == 0) throw ConfigError("omega_bins", "must be positive");
  spectrum.check_grid(basis);

  const KickPropagator kick(cos2_matrix(basis));
  ScanResult result;
  result.points.resize(kick_strengths.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < kick_strengths.size(); i = next++) {
      ScanPoint& point = result.points[i];
      point.kick_strength = kick_strengths[i];
      try {
        PulseTrainSpec train{kick_strengths[i], tau_fraction, 1, PulseShape::delta, 0.0};
        const auto set = classify_edge_states(quasienergy_decomposition(one_cycle_operator(train, kick, spectrum)));
        point.levels.reserve(set.size());
        for (const auto& e : set.entries()) point.levels.push_back({e.omega, e.cls, e.lower_weight});
      } catch (const std::exception& ex) {
        point.levels.clear();
        point.error = ex.what();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads,
                                                           static_cast<unsigned>(kick_strengths.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  DensityHistogram& h = result.histogram;
  h.omega_bins = options.omega_bins;
  h.kick_strengths.assign(kick_strengths.begin(), kick_strengths.end());
  h.counts.assign(kick_strengths.size(), std::vector<int>(options.omega_bins, 0));
  const double width = 2.0 * kPi / static_cast<double>(options.omega_bins);
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    for (const auto& level : result.points[i].levels) {
      if (level.cls == StateClass::artifact) continue;
      auto bin = static_cast<std::size_t>(std::floor((level.omega + kPi) / width));
      bin = std::min(bin, options.omega_bins - 1);
      ++h.counts[i][bin];
    }
  }
  return result;
}

Eigen::MatrixXcd planar_one_cycle_matrix(double kick_strength, Rational tau_fraction, int grid_size) {
  if (grid_size < 1) throw ConfigError("grid_size", "must be >= 1");
  if (!(kick_strength >= 0.0)) throw ConfigError("P", "kick strength must be >= 0");
  const Eigen::Index n = 2 * grid_size + 1;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off = Eigen::VectorXd::Constant(n - 1, 0.5);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalError("planar kick: eigendecomposition failed");
  const Eigen::MatrixXd& v = solver.eigenvectors();
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a.col(k) = v.col(k).cast<std::complex<double>>() * std::polar(1.0, kick_strength * solver.eigenvalues()[k]);
  }
  Eigen::MatrixXcd u = a * v.transpose().cast<std::complex<double>>();

  // Half period tau/2 = 2 pi p/q; E_J tau/2 = pi J^2 p/q, reduced exactly.
  const std::int64_t p = tau_fraction.num();
  const std::int64_t q = tau_fraction.den();
  Eigen::VectorXcd half(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::int64_t j = i - grid_size;
    const std::int64_t k = ((j * j) % (2 * q)) * (p % (2 * q)) % (2 * q);
    half[i] = std::polar(1.0, -kPi * static_cast<double>(k) / static_cast<double>(q));
  }
  return half.asDiagonal() * u * half.asDiagonal();
}

std::vector<double> planar_reference_spectrum(double kick_strength, Rational tau_fraction, int grid_size) {
  const auto eig = normal_eigensystem(planar_one_cycle_matrix(kick_strength, tau_fraction, grid_size));
  std::vector<double> out(static_cast<std::size_t>(eig.eigenvalues.size()));
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    out[static_cast<std::size_t>(k)] = wrap_quasienergy(-std::arg(eig.eigenvalues[k]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace kickrot
