#pragma once

#include <cmath>
#include <vector>

namespace starlab {

// ---------------------------------------------------------------------------
// Bessel functions of the first kind, real order nu >= 0.
//
// Power series on the cancellation-free region (z/2)^2 <= nu+1, Miller
// backward recurrence with Neumann-series normalization beyond it. Working
// range: 0 <= nu <= 200, 0 <= z <= 2e4, relative accuracy ~1e-13 away from
// zeros of J_nu.
double bessel_j(double nu, double z);

// Psi_nu(z) = J_nu(2 sqrt z) z^{-nu/2}, entire in z, Psi_nu(0)=1/Gamma(nu+1).
// Satisfies z Psi'' + (nu+1) Psi' + Psi = 0 and Psi^{(d)} = (-1)^d Psi_{nu+d}.
double bessel_psi(double nu, double z);
double bessel_psi_deriv(double nu, double z, int d);

// b-th positive zero of J_nu, b >= 1. Sequential sign-change scan from below
// the first oscillation, bisection bracket, Newton polish.
double bessel_zero(double nu, int b);
std::vector<double> bessel_zeros(double nu, int count);

// ---------------------------------------------------------------------------
// Gauss rules and orthonormal polynomials for the weight x^p (1-x)^q on [0,1],
// p, q > -1.

struct QuadratureRule {
  std::vector<double> node;    // strictly inside (0,1), ascending
  std::vector<double> weight;  // positive
  double p = 0.0, q = 0.0;     // weight exponents the rule integrates against
  int size() const { return static_cast<int>(node.size()); }
  double integrate(const std::vector<double>& f) const;
};

QuadratureRule gauss_jacobi_rule(int n, double p, double q);

// Orthonormal polynomial family for x^p (1-x)^q dx on [0,1] via the shifted
// Jacobi three-term recurrence (stored in monic alpha/beta form).
class OrthoBasis {
 public:
  OrthoBasis() = default;
  OrthoBasis(int n, double p, double q);

  int size() const { return n_; }
  double p() const { return p_; }
  double q() const { return q_; }
  double mu0() const { return mu0_; }  // integral of the weight

  // out[j*n + k] = d^j/dx^j p_k(x), j = 0..dmax, k = 0..n-1.
  void eval_stack(double x, int dmax, double* out) const;
  std::vector<double> eval(double x) const;

  // Recurrence data (alpha_k, sqrt(beta_k)); sb[0] = sqrt(mu0).
  const std::vector<double>& alpha() const { return a_; }
  const std::vector<double>& sqrt_beta() const { return sb_; }

 private:
  int n_ = 0;
  double p_ = 0.0, q_ = 0.0, mu0_ = 0.0;
  std::vector<double> a_, sb_;
};

// ---------------------------------------------------------------------------
// Dirichlet Bessel eigenbasis on (0,1) for the weight x^nu dx:
// psi_b(x) = n_b Psi_nu(mu_b x), psi_b(1) = 0, -(x D^2 + (nu+1) D) psi_b =
// mu_b psi_b, orthonormal in L^2(x^nu dx); mu_b = (j_{nu,b}/2)^2.
class BesselBasis {
 public:
  BesselBasis() = default;
  BesselBasis(double nu, int count);

  int size() const { return static_cast<int>(mu_.size()); }
  double nu() const { return nu_; }
  double mu(int b) const { return mu_[b]; }            // b = 0-based
  double zero(int b) const { return j_[b]; }
  const std::vector<double>& mus() const { return mu_; }

  // d-th derivative of psi_b at x.
  double eval(int b, double x, int d = 0) const;

 private:
  double nu_ = 0.0;
  std::vector<double> j_, mu_, norm_;
};

// ---------------------------------------------------------------------------
// Orthonormal sine modes phi_a(t) = sin(a pi t / (2T)) / sqrt(2T) on the
// symmetric doubled interval (-2T, 2T); -d^2/dt^2 phi_a = lambda_a phi_a with
// lambda_a = (a pi / (2T))^2. These are the odd half of the Dirichlet system
// on (-2T, 2T), which is all an odd extension ever excites.
struct TimeBasis {
  double T = 1.0;

  double lambda(int a) const {
    const double w = a * pi() / (2.0 * T);
    return w * w;
  }
  double phi(int a, double t) const {
    return std::sin(a * pi() * t / (2.0 * T)) / std::sqrt(2.0 * T);
  }
  // j-th time derivative.
  double phi_deriv(int a, double t, int j) const {
    const double w = a * pi() / (2.0 * T);
    return std::pow(w, j) *
           std::sin(a * pi() * t / (2.0 * T) + j * pi() / 2.0) /
           std::sqrt(2.0 * T);
  }
  static double pi() { return 3.14159265358979323846264338327950288; }
};

}  // namespace starlab
