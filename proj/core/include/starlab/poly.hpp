#pragma once

#include <vector>

namespace starlab {

// Dense univariate polynomial, coefficients in ascending degree.
// Used for cutoff construction and for expanding powers of the degenerate
// second-order operators into D^r with polynomial coefficients.
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeff) : c_(std::move(coeff)) { trim(); }
  static Polynomial constant(double v) { return Polynomial({v}); }
  static Polynomial identity() { return Polynomial({0.0, 1.0}); }

  const std::vector<double>& coeff() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool zero() const { return c_.empty(); }

  double eval(double x) const;
  // value and first dmax derivatives at x; out has dmax+1 slots
  void eval_stack(double x, int dmax, double* out) const;

  Polynomial derivative() const;
  // antiderivative with zero constant term
  Polynomial antiderivative() const;
  // p(a + b*x)
  Polynomial compose_affine(double a, double b) const;
  // x^k * p
  Polynomial shift_up(int k) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;

private:
  void trim();
  std::vector<double> c_;
};

}  // namespace starlab
