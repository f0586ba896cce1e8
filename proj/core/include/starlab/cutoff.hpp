#pragma once

#include <vector>

#include "starlab/poly.hpp"

namespace starlab {

// Piecewise-polynomial C^12 cutoff. Each transition piece stores its
// polynomial in the scaled local variable v = (x - center) * scale with
// |v| <= 1/2, which keeps coefficient magnitudes moderate; derivatives pick
// up scale^d by the chain rule. Plateaus are exact constants, so derivative
// stacks of every order vanish there identically.
class Cutoff {
public:
  // d-th derivative at x (d = 0 gives the value); exact up to d = 12,
  // zero beyond the polynomial degree inside transition pieces
  double eval(double x, int d = 0) const;

  // 1 on [0, 1/3], strictly decreasing, 0 on [2/3, 1]
  static Cutoff partition();
  // 0 off [1/6, 5/6], 1 on [1/3, 2/3]
  static Cutoff relocation();
  // rises 0 -> 1 across [lo, hi], constant outside
  static Cutoff rise(double lo, double hi);

private:
  struct Piece {
    double lo, hi;       // x-interval
    double center, scale;
    Polynomial p;        // in v = (x - center) * scale
    bool constant;
    double value;        // used when constant
  };
  std::vector<Piece> pieces_;

  static Piece const_piece(double lo, double hi, double v);
  static Piece step_piece(double lo, double hi, bool rising);
};

}  // namespace starlab
