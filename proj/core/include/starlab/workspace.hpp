#pragma once

#include <Eigen/Core>
#include <array>

#include "starlab/chart.hpp"
#include "starlab/cutoff.hpp"
#include "starlab/specfun.hpp"

namespace starlab {

// Uniform sample grid on [0, T]: nt steps, nt+1 samples.
struct TimeGrid {
  double T = 1.0;
  int nt = 64;

  int samples() const { return nt + 1; }
  double dt() const { return T / nt; }
  double t(int i) const { return T * i / nt; }
};

struct WorkspaceParams {
  int N = 7;
  int chart_modes = 32;   // Dirichlet Bessel modes per chart
  int global_modes = 64;  // orthonormal polynomial modes on [0,1]
  int nt = 64;
  double T = 1.0;
  int quad_points = 100;  // per segment of the composite rules
};

// Cached discretization context: quadrature rules, chart eigenbases, the
// polynomial basis on [0,1], cutoffs sampled with derivatives, and the
// matrices that split a polynomial-basis function into chart eigenbasis
// coefficients. Everything here is immutable after construction.
class Workspace {
public:
  explicit Workspace(WorkspaceParams p);

  const WorkspaceParams& params() const { return par_; }
  TimeGrid time_grid() const { return {par_.T, par_.nt}; }
  Chart chart(int mu) const { return Chart(mu, par_.N); }

  // weight xi^{nu_mu} in the chart coordinate
  const QuadratureRule& chart_rule(int mu) const { return crule_[mu]; }
  // weight x^{3/2} (1-x)^{N/2-1}
  const QuadratureRule& global_rule() const { return grule_; }

  const BesselBasis& chart_basis(int mu) const { return cbasis_[mu]; }
  const OrthoBasis& global_basis() const { return gbasis_; }

  const Cutoff& partition_cutoff() const { return omega_; }
  const Cutoff& relocation_cutoff() const { return chi_; }

  // psi_b^(d) at the chart-mu rule nodes (rows: nodes, cols: modes), d <= 2
  const Eigen::MatrixXd& chart_basis_values(int mu, int d) const {
    return cvals_[mu][d];
  }
  // global basis d^d/dx^d P_n at the global rule nodes
  const Eigen::MatrixXd& global_basis_values(int d) const { return gvals_[d]; }
  // global basis (as a function of x) at the chart-mu nodes, d/dx derivatives
  const Eigen::MatrixXd& global_at_chart(int mu, int d) const {
    return gatc_[mu][d];
  }
  // values of the chart-mu split factor (omega for mu=0, 1-omega for mu=1)
  // at the chart-mu nodes
  const Eigen::VectorXd& split_factor(int mu) const { return cutc_[mu]; }
  // chart-mu eigenbasis coefficients of split_factor * P_n, one column per n
  const Eigen::MatrixXd& split_matrix(int mu) const { return split_[mu]; }

  // Composite Gauss rule on [0,1] for the weight x^p (1-x)^q with interior
  // knots at the cutoff breakpoints {1/6, 1/3, 2/3, 5/6}; endpoint segments
  // carry the singular factor in the rule, elsewhere the weight is folded
  // into the node weights analytically.
  static QuadratureRule composite_rule(double p, double q, int pts_per_segment);

private:
  WorkspaceParams par_;
  Cutoff omega_, chi_;
  std::array<QuadratureRule, 2> crule_;
  QuadratureRule grule_;
  std::array<BesselBasis, 2> cbasis_;
  OrthoBasis gbasis_;
  std::array<std::array<Eigen::MatrixXd, 3>, 2> cvals_;
  std::array<Eigen::MatrixXd, 3> gvals_;
  std::array<std::array<Eigen::MatrixXd, 3>, 2> gatc_;
  std::array<Eigen::VectorXd, 2> cutc_;
  std::array<Eigen::MatrixXd, 2> split_;
};

}  // namespace starlab
