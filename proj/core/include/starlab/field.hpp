#pragma once

#include <Eigen/Core>
#include <functional>
#include <utility>

#include "starlab/workspace.hpp"

namespace starlab {

// Function on one chart, stored by coefficients in the chart's Dirichlet
// eigenbasis. The representation is exact under the chart laplacian and
// under the norm ladder; `degraded` marks results whose top modes carry
// non-negligible energy (the projection behind them lost accuracy).
struct GridFunction {
  int chart = 0;
  Eigen::VectorXd coeff;
  bool degraded = false;
};

// Function on [0,1] in the global polynomial basis.
struct GlobalFunction {
  Eigen::VectorXd coeff;
};

// -- representation changes ------------------------------------------------

// project nodal values at the chart rule nodes onto the eigenbasis
GridFunction chart_project(const Workspace& ws, int mu, const Eigen::VectorXd& nodal);
// d-th local-coordinate derivative at the chart rule nodes
Eigen::VectorXd chart_values(const Workspace& ws, const GridFunction& u, int d = 0);

GlobalFunction global_project(const Workspace& ws, const Eigen::VectorXd& nodal);
Eigen::VectorXd global_values(const Workspace& ws, const GlobalFunction& u, int d = 0);

// energy fraction of the top two modes; indicator for lossy projections
double tail_fraction(const GridFunction& u);

// u = omega u + (1-omega) u, each piece in its chart's eigenbasis
std::pair<GridFunction, GridFunction> split(const Workspace& ws, const GlobalFunction& u);

// -- chart operators ---------------------------------------------------------

// lap u (diagonal, exact): psi_b -> -mu_b psi_b
GridFunction apply_laplacian(const Workspace& ws, const GridFunction& u);
// sqrt(xi) du/dxi, nodal values resp. lossy projection
Eigen::VectorXd apply_sqrtx_d_values(const Workspace& ws, const GridFunction& u);
GridFunction apply_sqrtx_d(const Workspace& ws, const GridFunction& u);
// du/dxi in the chart coordinate
Eigen::VectorXd apply_d_values(const Workspace& ws, const GridFunction& u);
GridFunction apply_d(const Workspace& ws, const GridFunction& u);
// x(1-x) d/dx in the global orientation (vanishes at both endpoints)
Eigen::VectorXd apply_degenerate_d_values(const Workspace& ws, const GridFunction& u);
GridFunction apply_degenerate_d(const Workspace& ws, const GridFunction& u);

// -- spatial norms -----------------------------------------------------------
// The ladder seminorm of order l is ||lap^m u|| for l = 2m and
// ||sqrt(xi) d/dxi lap^m u|| for l = 2m+1; on eigenbasis coefficients both
// reduce to the diagonal sum_b mu_b^l c_b^2.

double chart_seminorm(const Workspace& ws, const GridFunction& u, int ell);
// ( sum_{l<=k} seminorm_l^2 )^{1/2}; requires chart_modes >= k+2
double chart_norm(const Workspace& ws, const GridFunction& u, int k);
// even-orders-only ladder: ( sum_{m<=kappa} ||lap^m u||^2 )^{1/2}
double chart_star_norm(const Workspace& ws, const GridFunction& u, int kappa);

// chart-combined norms of a function on [0,1]
double graded_norm(const Workspace& ws, const GlobalFunction& u, int k);
double star_norm(const Workspace& ws, const GlobalFunction& u, int kappa);
// pair norm: y enters one order higher than v
double pair_norm(const Workspace& ws, const GlobalFunction& y, const GlobalFunction& v, int k);

// -- space-time fields -------------------------------------------------------

// (y, v) sampled on the workspace time grid; row i holds the global-basis
// coefficients at t_i. `deriv`, when present, fills exact j-th
// time-derivative samples; without it derivatives of order <= 4 come from
// 4th-order finite differences and higher orders are refused.
struct PairField {
  Eigen::MatrixXd y, v;
  std::function<void(int j, Eigen::MatrixXd& yj, Eigen::MatrixXd& vj)> deriv;
};

// j-th time derivative of uniformly sampled rows (4th-order stencils)
Eigen::MatrixXd fd_time_derivative(const TimeGrid& g, const Eigen::MatrixXd& f, int j);

// Simpson weights on the sample grid (nt even)
Eigen::VectorXd time_integration_weights(const TimeGrid& g);

// ( sum_{i+k<=nu} int_0^T ||d_t^{2i} u(t)||*_k^2 dt )^{1/2}, chart-combined,
// applied to y and v separately and combined without an order shift
double norm2(const Workspace& ws, const PairField& u, int nu);
// sup over sample nodes t_i <= tau of sum_{j+k<=n} ||d_t^j u(t_i)||_{[mu]k},
// pair ladder (y at k+1), chart-combined in quadrature
double sup_norm(const Workspace& ws, const PairField& u, double tau, int n);
// ( sum_{j+k<=n} int_0^T ||d_t^j u(t)||_{[mu]k}^2 dt )^{1/2}, chart-combined
double integral_norm(const Workspace& ws, const PairField& u, int n);

}  // namespace starlab
