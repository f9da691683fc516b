// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

#include "kickrot/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kickrot/error.hpp"

namespace kickrot {

double cos2_diagonal(int j, int m) {
  const double jj = j;
  const double mm = static_cast<double>(m) * m;
  return 1.0 / 3.0 + (2.0 / 3.0) * (jj * (jj + 1.0) - 3.0 * mm) / ((2.0 * jj - 1.0) * (2.0 * jj + 3.0));
}

double cos2_offdiagonal(int j, int m) {
  const double jj = j;
  const double mm = static_cast<double>(m) * m;
  const double a = (jj + 1.0) * (jj + 1.0) - mm;
  const double b = (jj + 2.0) * (jj + 2.0) - mm;
  if (a <= 0.0 || b <= 0.0) return 0.0;
  return std::sqrt(a * b) / ((2.0 * jj + 3.0) * std::sqrt((2.0 * jj + 1.0) * (2.0 * jj + 5.0)));
}

double cos2_element(int j1, int j2, int m) {
  if (j1 < std::abs(m) || j2 < std::abs(m)) return 0.0;
  if (j1 == j2) return cos2_diagonal(j1, m);
  if (j1 == j2 + 2) return cos2_offdiagonal(j2, m);
  if (j2 == j1 + 2) return cos2_offdiagonal(j1, m);
  return 0.0;
}

CouplingMatrix::CouplingMatrix(BasisSpec basis, Eigen::VectorXd diag, Eigen::VectorXd offdiag)
    : basis_(basis), diag_(std::move(diag)), offdiag_(std::move(offdiag)) {
  const auto n = static_cast<Eigen::Index>(basis_.dimension());
  if (diag_.size() != n || offdiag_.size() != n - 1) {
    throw std::invalid_argument("CouplingMatrix: band sizes do not match the basis");
  }
}

Eigen::MatrixXd CouplingMatrix::dense() const {
  const auto n = diag_.size();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  c.diagonal() = diag_;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    c(i + 1, i) = offdiag_[i];
    c(i, i + 1) = offdiag_[i];
  }
  return c;
}

Eigen::VectorXcd CouplingMatrix::apply(const Eigen::VectorXcd& psi) const {
  const auto n = diag_.size();
  Eigen::VectorXcd out = diag_.cwiseProduct(psi);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    out[i] += offdiag_[i] * psi[i + 1];
    out[i + 1] += offdiag_[i] * psi[i];
  }
  return out;
}

double CouplingMatrix::expectation(const Eigen::VectorXcd& psi) const {
  double sum = 0.0;
  const auto n = diag_.size();
  for (Eigen::Index i = 0; i < n; ++i) sum += diag_[i] * std::norm(psi[i]);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    sum += 2.0 * offdiag_[i] * (std::conj(psi[i + 1]) * psi[i]).real();
  }
  return sum;
}

CouplingMatrix cos2_matrix(const BasisSpec& basis) {
  const auto n = static_cast<Eigen::Index>(basis.dimension());
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = basis.j_at(static_cast<std::size_t>(i));
    diag[i] = cos2_diagonal(j, basis.m());
    if (i + 1 < n) off[i] = cos2_offdiagonal(j, basis.m());
  }
  return {basis, std::move(diag), std::move(off)};
}

GaussLegendreRule::GaussLegendreRule(int points) {
  if (points < 1) throw std::invalid_argument("GaussLegendreRule: need at least one point");
  const int n = points;
  nodes_.resize(n);
  weights_.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes_[i] = -x;
    nodes_[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights_[i] = w;
    weights_[n - 1 - i] = w;
  }
}

namespace {

// Normalized P_l^m(x) for l = m..l_max, |m| given.
std::vector<double> legendre_column(int l_max, int m, double x) {
  m = std::abs(m);
  std::vector<double> p(static_cast<std::size_t>(std::max(l_max - m + 1, 0)));
  if (p.empty()) return p;
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  double pmm = 1.0 / std::sqrt(2.0);
  for (int k = 1; k <= m; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  p[0] = pmm;
  if (l_max == m) return p;
  p[1] = x * std::sqrt(2.0 * m + 3.0) * pmm;
  const double mm = static_cast<double>(m) * m;
  for (int l = m + 2; l <= l_max; ++l) {
    const double ll = static_cast<double>(l) * l;
    const double a = std::sqrt((4.0 * ll - 1.0) / (ll - mm));
    const double lm1 = l - 1.0;
    const double b = std::sqrt((lm1 * lm1 - mm) / (4.0 * lm1 * lm1 - 1.0));
    p[l - m] = a * (x * p[l - m - 1] - b * p[l - m - 2]);
  }
  return p;
}

}  // namespace

double normalized_legendre(int l, int m, double x) {
  if (l < std::abs(m)) return 0.0;
  return legendre_column(l, m, x).back();
}

double quadrature_element(int j1, int j2, int m, const GaussLegendreRule& rule) {
  const int am = std::abs(m);
  if (j1 < am || j2 < am) {
    throw ConfigError("J", "quadrature_element requires J1, J2 >= |M|");
  }
  const int degree = j1 + j2 + 2;
  if (degree > rule.exact_degree()) {
    throw ConfigError("order", "Gauss-Legendre rule with " + std::to_string(rule.points()) +
                                   " points is exact only to degree " +
                                   std::to_string(rule.exact_degree()) + ", need " +
                                   std::to_string(degree));
  }
  const int l_max = std::max(j1, j2);
  double sum = 0.0;
  for (int k = 0; k < rule.points(); ++k) {
    const double x = rule.nodes()[k];
    const auto p = legendre_column(l_max, am, x);
    sum += rule.weights()[k] * x * x * p[j1 - am] * p[j2 - am];
  }
  return sum;
}

double quadrature_element(int j1, int j2, int m) {
  const int points = (j1 + j2 + 2) / 2 + 1;
  return quadrature_element(j1, j2, m, GaussLegendreRule(points));
}

}  // namespace kickrot
