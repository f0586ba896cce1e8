#pragma once

#include <Eigen/Core>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "starlab/field.hpp"
#include "starlab/io.hpp"
#include "starlab/poly.hpp"

namespace starlab {

// Exact application of derivative words to eigenbasis functions, nodal
// evaluation of the norm ladder on functions that are not eigenbasis sums,
// and the empirical inequality verifiers built on both.
//
// The word machinery rests on one closed algebra: with lap = xi D^2 + c D
// and psi_b(xi) proportional to an entire Bessel-type kernel of order nu,
// every word in {D, lap} applied to psi_b is a finite combination of the
// same kernel at shifted order, with coefficients polynomial in the
// eigenvalue. Words are therefore evaluated without any re-projection and
// without finite differencing; the only error left is quadrature.

// lap^m expanded as a differential operator: lap^m = sum_r coef[r](xi) D^r,
// coef has 2m+1 entries, lap = xi D^2 + drift D.
std::vector<Polynomial> lap_power_coefficients(int m, double drift);

// Nodal values at the chart quadrature nodes of
//   (d/dxi)^d [ Ddot^k lap^m D^j u ],   Ddot = sqrt(xi) d/dxi,
// for u in the chart eigenbasis. Exact in the offset algebra. An odd k
// leaves one sqrt(xi) factor in the values (applied nodally); extra
// derivatives on top of that are not representable, so odd k requires d=0.
Eigen::VectorXd word_values(const Workspace& ws, const GridFunction& u,
                            int k, int m, int j, int d = 0);

// Chart-measure L2 norm of Ddot^k lap^m D^j u.
double word_norm(const Workspace& ws, const GridFunction& u, int k, int m, int j);

// Order-k chart norm evaluated nodally from a derivative stack
// (column r = r-th local-coordinate derivative at the chart rule nodes;
// columns 0..k required). This is the operator definition of the ladder,
// valid for functions whose eigencoefficient ladder is not (products,
// compositions, constants).
double chart_norm_nodal(const Workspace& ws, int mu,
                        const Eigen::MatrixXd& derivs, int k);

// Smallest integer exceeding half the model dimension; the lowest ladder
// order whose norm controls the sup norm.
int sobolev_index(int N);

// One empirical inequality sweep. worst_ratio is the largest left/right
// ratio seen at the finest resolution; resolution_sweep records the worst
// ratio per resolution so stability can be judged. The verifiers never
// pass or fail on an absolute constant, only on resolution-independence.
struct InequalityReport {
  std::string inequality_id;
  std::vector<std::pair<std::string, double>> parameters;
  int trials = 0;
  double worst_ratio = 0.0;
  std::vector<std::pair<int, double>> resolution_sweep;  // (modes, worst ratio)

  // Largest relative step-up between consecutive sweep entries; ~0 when the
  // empirical constant has saturated. Ratios at the quadrature noise floor
  // count as stable regardless of their relative wobble.
  double drift() const;
  bool stable(double tol = 0.10) const;
  double parameter(const std::string& key) const;  // throws if absent
  // flags a worst ratio above the ceiling stored under bound_key
  bool exceeds(const std::string& bound_key) const;

  JsonValue to_json() const;
};

// Empirical embedding constant sup ||u||_{L^p} / ||u||_{[mu]s} over random
// band-limited trials on one chart, measure xi^(n/2-1) dxi with n the
// chart's model dimension. p = infinity selects the sup norm and requires
// s >= sobolev_index(n); finite p requires 1/2 - s/n <= 1/p <= 1/2.
InequalityReport verify_embedding_estimate(const Workspace& ws, int mu, int s,
                                           double p, int trials);

// Convenience form on the dimension-N model chart of a self-built
// workspace; returns the worst ratio only.
double sobolev_constant(int s, int N, int trials,
                        double p = std::numeric_limits<double>::infinity());

// Derivative-absorption families on both charts:
//   ||lap^m D^j u||      <= C ||lap^(m+j) u||
//   ||Ddot^k D u||       <= C ||Ddot^k lap u||
// plus the exact antiderivative identities behind them, reported as
// relative residuals. Word-product families (a product of derivative
// words measured in plain L2 against graded norms of the factors, word
// order n = sum l + 2 sum j) are included when the chart resolution
// supports the normalization norm of order 2*sobolev_index(model n).
// n_max caps the word order 2(m+j); trials counts random functions per
// family per resolution.
std::vector<InequalityReport> verify_derivative_estimates(const Workspace& ws,
                                                          int n_max, int trials);

// ||f g||_k <= C ||f||_{s1} ||g||_{s2} on both charts, product ladder
// evaluated nodally. Preconditions s1 >= k, s2 >= k and
// s1 + s2 >= sobolev_index(N) + k; a violation throws naming the failed
// inequality. k <= 6.
InequalityReport verify_product_estimate(const Workspace& ws, int s1, int s2,
                                         int k, int trials);

// ||F(u)||_n <= C (1 + ||u||_n) for the entire function F = expm1 on
// ensembles with ||u||_{2*sobolev_index} <= 1, both charts. n <= 4
// (composition derivative stacks are hardcoded to that depth).
InequalityReport verify_composition_estimate(const Workspace& ws, int n,
                                             int trials);

}  // namespace starlab
