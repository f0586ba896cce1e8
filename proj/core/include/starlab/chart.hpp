#pragma once

#include <stdexcept>

namespace starlab {

// One of the two boundary charts on [0,1]. In the local coordinate xi
// (xi = x near the left end, xi = 1-x near the right end) both charts carry
// the same model operator
//     lap = xi d^2/dxi^2 + (n/2) d/dxi,   n = model_n(),
// self-adjoint in L^2(xi^{n/2-1} dxi). The left chart is the n = 5 instance;
// the right chart uses the problem parameter N.
struct Chart {
  int mu = 0;   // 0: left end, 1: right end
  int N = 5;

  Chart() = default;
  Chart(int mu_, int N_) : mu(mu_), N(N_) {
    if (mu != 0 && mu != 1) throw std::invalid_argument("chart tag must be 0 or 1");
    if (N % 2 == 0)
      throw std::domain_error(
          "N must be odd: integer N/2 is the excluded analytic-boundary case (B)");
  }

  double model_n() const { return mu == 0 ? 5.0 : static_cast<double>(N); }
  // exponent of the chart weight xi^{model_n/2 - 1}
  double weight_exponent() const { return 0.5 * model_n() - 1.0; }
  // drift coefficient of the model operator
  double drift() const { return 0.5 * model_n(); }
  // chart coordinate of the global point x
  double local(double x) const { return mu == 0 ? x : 1.0 - x; }
  // global point of the chart coordinate xi
  double global(double xi) const { return mu == 0 ? xi : 1.0 - xi; }
  // sign of d(xi)/dx
  double orientation() const { return mu == 0 ? 1.0 : -1.0; }
};

}  // namespace starlab
