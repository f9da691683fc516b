// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file coupling.hpp
 * @brief Banded matrix of cos^2(theta) in the |J,M> basis.
 *
 * Only Delta J = 0, +-2 elements are nonzero. They follow from
 * cos^2 = 1/3 + (2/3) P_2(cos theta):
 *
 *   <J,M|cos^2|J,M>     = 1/3 + 2/3 (J(J+1) - 3M^2) / ((2J-1)(2J+3))
 *   <J+2,M|cos^2|J,M>   = sqrt(((J+1)^2-M^2)((J+2)^2-M^2)) / ((2J+3) sqrt((2J+1)(2J+5)))
 *
 * A Gauss-Legendre oracle integrates the same elements numerically.
 */

#pragma once

#include <Eigen/Dense>

#include <vector>

#include "kickrot/basis.hpp"

namespace kickrot {

[[nodiscard]] double cos2_diagonal(int j, int m);
/// <J+2,M|cos^2|J,M>.
[[nodiscard]] double cos2_offdiagonal(int j, int m);
/// Any element; zero unless |j1 - j2| is 0 or 2.
[[nodiscard]] double cos2_element(int j1, int j2, int m);

class CouplingMatrix {
 public:
  CouplingMatrix(BasisSpec basis, Eigen::VectorXd diag, Eigen::VectorXd offdiag);

  [[nodiscard]] const BasisSpec& basis() const noexcept { return basis_; }
  [[nodiscard]] const Eigen::VectorXd& diagonal() const noexcept { return diag_; }
  /// offdiag[i] couples grid sites i and i+1.
  [[nodiscard]] const Eigen::VectorXd& off_diagonal() const noexcept { return offdiag_; }

  [[nodiscard]] Eigen::MatrixXd dense() const;
  [[nodiscard]] Eigen::VectorXcd apply(const Eigen::VectorXcd& psi) const;
  /// <psi|C|psi> for a vector on the grid.
  [[nodiscard]] double expectation(const Eigen::VectorXcd& psi) const;

 private:
  BasisSpec basis_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd offdiag_;
};

[[nodiscard]] CouplingMatrix cos2_matrix(const BasisSpec& basis);

/// n-point Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n-1.
class GaussLegendreRule {
 public:
  explicit GaussLegendreRule(int points);

  [[nodiscard]] int points() const noexcept { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] int exact_degree() const noexcept { return 2 * points() - 1; }
  [[nodiscard]] const std::vector<double>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Associated Legendre function normalized to unit L2 norm on [-1, 1].
[[nodiscard]] double normalized_legendre(int l, int m, double x);

/// Quadrature of P_j1^M(x) P_j2^M(x) x^2 over [-1,1]; rejects rules of too low order.
[[nodiscard]] double quadrature_element(int j1, int j2, int m, const GaussLegendreRule& rule);
/// Same, with the smallest rule that integrates the integrand exactly.
[[nodiscard]] double quadrature_element(int j1, int j2, int m);

}  // namespace kickrot
