#include "starlab/poly.hpp"

#include <cmath>
#include <cstddef>

namespace starlab {

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Polynomial::eval(double x) const {
  double r = 0.0;
  for (std::size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
  return r;
}

void Polynomial::eval_stack(double x, int dmax, double* out) const {
  // Horner with simultaneous derivative accumulation; out[d] = p^(d)(x).
  for (int d = 0; d <= dmax; ++d) out[d] = 0.0;
  for (std::size_t i = c_.size(); i-- > 0;) {
    for (int d = dmax; d >= 1; --d) out[d] = out[d] * x + d * out[d - 1];
    out[0] = out[0] * x + c_[i];
  }
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial();
  std::vector<double> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
  if (c_.empty()) return Polynomial();
  std::vector<double> a(c_.size() + 1, 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i) a[i + 1] = c_[i] / static_cast<double>(i + 1);
  return Polynomial(std::move(a));
}

Polynomial Polynomial::compose_affine(double a, double b) const {
  Polynomial lin({a, b});
  Polynomial r;
  for (std::size_t i = c_.size(); i-- > 0;) r = r * lin + Polynomial::constant(c_[i]);
  return r;
}

Polynomial Polynomial::shift_up(int k) const {
  if (c_.empty()) return Polynomial();
  std::vector<double> s(c_.size() + static_cast<std::size_t>(k), 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i) s[i + static_cast<std::size_t>(k)] = c_[i];
  return Polynomial(std::move(s));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] -= o.c_[i];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (c_.empty() || o.c_.empty()) return Polynomial();
  std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(double s) const {
  std::vector<double> r(c_);
  for (double& v : r) v *= s;
  return Polynomial(std::move(r));
}

}  // namespace starlab
