#include "starlab/cutoff.hpp"

#include <cmath>

namespace starlab {

namespace {

// Odd antiderivative of the bump (1/4 - v^2)^12 in the centered variable
// v = t - 1/2. The centered form keeps all coefficients <= O(1), so the
// normalized step evaluates to ~1e-14 accuracy; the naive expansion in t
// loses ~1e-6 to cancellation at this degree.
Polynomial bump_antiderivative() {
  Polynomial quad({0.25, 0.0, -1.0});
  Polynomial bump = Polynomial::constant(1.0);
  for (int i = 0; i < 12; ++i) bump = bump * quad;
  return bump.antiderivative();
}

}  // namespace

Cutoff::Piece Cutoff::const_piece(double lo, double hi, double v) {
  Piece p;
  p.lo = lo;
  p.hi = hi;
  p.center = 0.5 * (lo + hi);
  p.scale = 1.0;
  p.constant = true;
  p.value = v;
  return p;
}

Cutoff::Piece Cutoff::step_piece(double lo, double hi, bool rising) {
  Piece p;
  p.lo = lo;
  p.hi = hi;
  p.center = 0.5 * (lo + hi);
  p.scale = 1.0 / (hi - lo);
  p.constant = false;
  p.value = 0.0;
  Polynomial a = bump_antiderivative();
  double half = a.eval(0.5);
  double s = rising ? 1.0 : -1.0;
  p.p = Polynomial::constant(0.5) + a * (s / (2.0 * half));
  return p;
}

double Cutoff::eval(double x, int d) const {
  const Piece* pc = &pieces_.front();
  for (const Piece& pp : pieces_) {
    if (x >= pp.lo) pc = &pp;
    else break;
  }
  if (pc->constant) return d == 0 ? pc->value : 0.0;
  double v = (x - pc->center) * pc->scale;
  if (d > pc->p.degree()) return 0.0;
  std::vector<double> stack(static_cast<std::size_t>(d) + 1);
  pc->p.eval_stack(v, d, stack.data());
  return stack[static_cast<std::size_t>(d)] * std::pow(pc->scale, d);
}

Cutoff Cutoff::partition() {
  Cutoff c;
  c.pieces_.push_back(const_piece(-1.0, 1.0 / 3.0, 1.0));
  c.pieces_.push_back(step_piece(1.0 / 3.0, 2.0 / 3.0, false));
  c.pieces_.push_back(const_piece(2.0 / 3.0, 2.0, 0.0));
  return c;
}

Cutoff Cutoff::relocation() {
  Cutoff c;
  c.pieces_.push_back(const_piece(-1.0, 1.0 / 6.0, 0.0));
  c.pieces_.push_back(step_piece(1.0 / 6.0, 1.0 / 3.0, true));
  c.pieces_.push_back(const_piece(1.0 / 3.0, 2.0 / 3.0, 1.0));
  c.pieces_.push_back(step_piece(2.0 / 3.0, 5.0 / 6.0, false));
  c.pieces_.push_back(const_piece(5.0 / 6.0, 2.0, 0.0));
  return c;
}

Cutoff Cutoff::rise(double lo, double hi) {
  Cutoff c;
  c.pieces_.push_back(const_piece(lo - 1.0, lo, 0.0));
  c.pieces_.push_back(step_piece(lo, hi, true));
  c.pieces_.push_back(const_piece(hi, hi + 1.0, 1.0));
  return c;
}

}  // namespace starlab
