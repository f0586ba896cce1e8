#include "starlab/specfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace starlab {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// value = m * 2^e with m in [0.5, 1) up to sign; exact exponent bookkeeping
// for products/sums whose magnitudes overflow double (Neumann normalization
// sums reach ~1e2000 for large orders).
struct Scaled {
  double m = 0.0;
  long e = 0;

  static Scaled from(double v) {
    Scaled s;
    if (v == 0.0) return s;
    int ex = 0;
    s.m = std::frexp(v, &ex);
    s.e = ex;
    return s;
  }
  static Scaled from_log2(double l2, int sign) {
    Scaled s;
    const double fl = std::floor(l2);
    s.e = static_cast<long>(fl) + 1;
    s.m = sign * std::exp2(l2 - fl - 1.0);  // in [0.5, 1)
    return s;
  }
  bool zero() const { return m == 0.0; }
  Scaled times(const Scaled& o) const {
    Scaled r = from(m * o.m);
    if (!r.zero()) r.e += e + o.e;
    return r;
  }
  Scaled times_pow2(long k) const {
    Scaled r = *this;
    if (!r.zero()) r.e += k;
    return r;
  }
  void add(const Scaled& o) {
    if (o.zero()) return;
    if (zero()) {
      *this = o;
      return;
    }
    long d = o.e - e;
    if (d > 80) {
      *this = o;
      return;
    }
    if (d < -80) return;
    double v = m + o.m * std::exp2(static_cast<double>(d));
    Scaled r = from(v);
    if (!r.zero()) r.e += e;
    *this = r;
  }
  double log2abs() const { return std::log2(std::fabs(m)) + e; }
  int sign() const { return m > 0 ? 1 : (m < 0 ? -1 : 0); }
};

void check_bessel_args(double nu, double z) {
  if (!(nu >= 0.0 && nu <= 200.0))
    throw std::domain_error("bessel: order out of supported range [0,200]");
  if (!(z >= 0.0 && z <= 2e4))
    throw std::domain_error("bessel: argument out of supported range [0,2e4]");
}

// Ascending series, used only where terms decrease monotonically.
double bessel_j_series(double nu, double z) {
  const double zeta = z * z / 4.0;
  const double lpre = nu * std::log(z / 2.0) - std::lgamma(nu + 1.0);
  if (lpre < -700.0) return 0.0;
  double sum = 1.0, term = 1.0;
  for (int k = 1; k <= 400; ++k) {
    term *= -zeta / (k * (nu + k));
    sum += term;
    if (std::fabs(term) <= 1e-18 * std::fabs(sum) + 1e-300) break;
  }
  return std::exp(lpre) * sum;
}

// Miller backward recurrence normalized by
//   sum_{k>=0} c_k J_{nu+2k}(z) = (z/2)^nu,  c_k = (nu+2k) Gamma(nu+k) / k!.
double bessel_j_miller(double nu, double z) {
  const double sigma_hi = 1.30 * std::max(nu, 1.3591409142295226 * z) + 40.0;
  int K = static_cast<int>(std::ceil(sigma_hi - nu)) + 1;
  if (K < 8) K = 8;
  if (K % 2) ++K;

  std::vector<double> f(K + 2, 0.0);
  std::vector<int> scale_at(K + 2, 0);
  f[K + 1] = 0.0;
  f[K] = 1e-280;
  int cur = 0;
  scale_at[K + 1] = scale_at[K] = 0;
  double hi = f[K], lo = f[K + 1];
  for (int i = K; i >= 1; --i) {
    double prev = (2.0 * (nu + i) / z) * hi - lo;
    if (std::fabs(prev) > 0x1p800) {
      prev *= 0x1p-864;
      hi *= 0x1p-864;
      ++cur;
    }
    lo = hi;
    hi = prev;
    f[i - 1] = prev;
    scale_at[i - 1] = cur;
  }
  // True values: J_{nu+i} proportional to f[i] * 2^{-864*(cur - scale_at[i])};
  // express everything relative to the final frame (scale count cur).
  auto frame = [&](int i) { return Scaled::from(f[i]).times_pow2(-864L * (cur - scale_at[i])); };

  // Normalization sum in scaled arithmetic; c_k via its ratio recurrence.
  Scaled c = Scaled::from_log2(std::lgamma(nu + 1.0) / 0.6931471805599453, 1);
  Scaled S = c.times(frame(0));
  for (int k = 1; 2 * k <= K; ++k) {
    // c_k / c_{k-1}; the k=1 case is written separately because the general
    // expression is 0/0 at nu = 0.
    const double ratio =
        k == 1 ? nu + 2.0
               : ((nu + 2.0 * k) * (nu + k - 1.0)) / ((nu + 2.0 * k - 2.0) * k);
    c = c.times(Scaled::from(ratio));
    S.add(c.times(frame(2 * k)));
  }
  if (S.zero()) return 0.0;

  const Scaled f0 = frame(0);
  if (f0.zero()) return 0.0;
  const double l2 =
      f0.log2abs() - S.log2abs() + nu * std::log2(z / 2.0);
  const int sign = f0.sign() * S.sign();
  if (l2 < -1060.0) return 0.0;
  if (l2 > 1020.0) throw std::range_error("bessel_j: overflow");
  return sign * std::exp2(l2);
}

}  // namespace

double bessel_j(double nu, double z) {
  check_bessel_args(nu, z);
  if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (z * z / 4.0 <= nu + 1.0) return bessel_j_series(nu, z);
  return bessel_j_miller(nu, z);
}

double bessel_psi(double nu, double z) {
  if (!(nu >= 0.0 && nu <= 200.0))
    throw std::domain_error("bessel_psi: order out of range");
  if (!(z >= 0.0 && z <= 1e8))
    throw std::domain_error("bessel_psi: argument out of range");
  if (z <= nu + 1.0) {
    // Direct series: Psi = sum (-1)^k z^k / (k! Gamma(nu+k+1)).
    double lg = -std::lgamma(nu + 1.0);
    double term = lg < -700.0 ? 0.0 : std::exp(lg);
    double sum = term;
    for (int k = 1; k <= 400; ++k) {
      term *= -z / (k * (nu + k));
      sum += term;
      if (std::fabs(term) <= 1e-18 * std::fabs(sum) + 1e-300) break;
    }
    return sum;
  }
  const double w = 2.0 * std::sqrt(z);
  return bessel_j(nu, w) * std::exp(-0.5 * nu * std::log(z));
}

double bessel_psi_deriv(double nu, double z, int d) {
  if (d < 0) throw std::domain_error("bessel_psi_deriv: d < 0");
  double v = bessel_psi(nu + d, z);
  return (d % 2) ? -v : v;
}

static double bessel_j_deriv(double nu, double z) {
  // J'_nu = (nu/z) J_nu - J_{nu+1}; valid for all nu >= 0, z > 0.
  return (nu / z) * bessel_j(nu, z) - bessel_j(nu + 1.0, z);
}

std::vector<double> bessel_zeros(double nu, int count) {
  if (count < 0) throw std::domain_error("bessel_zeros: count < 0");
  std::vector<double> out;
  out.reserve(count);
  if (count == 0) return out;
  // Zeros live beyond the turning point z ~ nu; start safely below the first.
  double z = std::max(0.25, nu > 0.5 ? nu + 0.25 * std::cbrt(nu) : 0.25);
  const double step = kPi / 8.0;
  double fz = bessel_j(nu, z);
  while (static_cast<int>(out.size()) < count) {
    double z2 = z + step;
    double f2 = bessel_j(nu, z2);
    if (fz == 0.0) {  // grid point hit a zero exactly
      out.push_back(z);
      z = z2;
      fz = f2;
      continue;
    }
    if (fz * f2 < 0.0) {
      double lo = z, hi = z2, flo = fz;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = bessel_j(nu, mid);
        if (flo * fm <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
        if (hi - lo < 1e-12 * hi) break;
      }
      double root = 0.5 * (lo + hi);
      for (int it = 0; it < 4; ++it) {
        const double fr = bessel_j(nu, root);
        const double dr = bessel_j_deriv(nu, root);
        if (dr == 0.0) break;
        const double nxt = root - fr / dr;
        if (nxt > std::max(lo - step, 0.5 * lo) && nxt < hi + step) root = nxt;
      }
      out.push_back(root);
    }
    z = z2;
    fz = f2;
  }
  return out;
}

double bessel_zero(double nu, int b) {
  if (b < 1) throw std::domain_error("bessel_zero: b < 1");
  return bessel_zeros(nu, b).back();
}

double QuadratureRule::integrate(const std::vector<double>& f) const {
  if (f.size() != node.size())
    throw std::invalid_argument("QuadratureRule::integrate: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += weight[i] * f[i];
  return s;
}

OrthoBasis::OrthoBasis(int n, double p, double q) : n_(n), p_(p), q_(q) {
  if (n < 1) throw std::domain_error("OrthoBasis: n < 1");
  if (!(p > -1.0 && q > -1.0))
    throw std::domain_error("OrthoBasis: weight exponents must exceed -1");
  mu0_ = std::exp(std::lgamma(p + 1.0) + std::lgamma(q + 1.0) -
                  std::lgamma(p + q + 2.0));
  a_.resize(n);
  sb_.resize(n);
  const double s = p + q;
  // Monic Jacobi recurrence on [-1,1] with (alpha,beta)=(q,p), mapped to
  // [0,1]: alpha-hat = (1+alpha)/2, beta-hat = beta/4.
  a_[0] = (p + 1.0) / (s + 2.0);
  sb_[0] = std::sqrt(mu0_);
  for (int k = 1; k < n; ++k) {
    const double den = (2.0 * k + s) * (2.0 * k + s + 2.0);
    const double ak = (p * p - q * q) / den;
    a_[k] = (1.0 + ak) / 2.0;
    const double bk = 4.0 * k * (k + q) * (k + p) * (k + s) /
                      ((2.0 * k + s) * (2.0 * k + s) * (2.0 * k + s + 1.0) *
                       (2.0 * k + s - 1.0));
    sb_[k] = std::sqrt(bk / 4.0);
  }
}

void OrthoBasis::eval_stack(double x, int dmax, double* out) const {
  const int n = n_;
  // p_0 = 1/sqrt(mu0); p_{k+1} = ((x-a_k) p_k - sb_k p_{k-1}) / sb_{k+1},
  // differentiated j times: (x-a_k) p_k^{(j)} + j p_k^{(j-1)} - sb_k ...
  for (int j = 0; j <= dmax; ++j) {
    double* row = out + static_cast<std::size_t>(j) * n;
    const double* below =
        (j >= 1) ? out + static_cast<std::size_t>(j - 1) * n : nullptr;
    row[0] = (j == 0) ? 1.0 / sb_[0] : 0.0;
    if (n == 1) continue;
    double v = (x - a_[0]) * row[0];
    if (j >= 1) v += j * below[0];
    row[1] = v / sb_[1];
    for (int k = 1; k + 1 < n; ++k) {
      double w = (x - a_[k]) * row[k] - sb_[k] * row[k - 1];
      if (j >= 1) w += j * below[k];
      row[k + 1] = w / sb_[k + 1];
    }
  }
}

std::vector<double> OrthoBasis::eval(double x) const {
  std::vector<double> v(n_);
  eval_stack(x, 0, v.data());
  return v;
}

QuadratureRule gauss_jacobi_rule(int n, double p, double q) {
  if (n < 1) throw std::domain_error("gauss_jacobi_rule: n < 1");
  OrthoBasis ob(n, p, q);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    J(k, k) = ob.alpha()[k];
    if (k + 1 < n) J(k, k + 1) = J(k + 1, k) = ob.sqrt_beta()[k + 1];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gauss_jacobi_rule: eigensolve failed");
  QuadratureRule r;
  r.p = p;
  r.q = q;
  r.node.resize(n);
  r.weight.resize(n);
  for (int i = 0; i < n; ++i) {
    r.node[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    r.weight[i] = ob.mu0() * v0 * v0;
  }
  return r;
}

BesselBasis::BesselBasis(double nu, int count) : nu_(nu) {
  if (count < 0) throw std::domain_error("BesselBasis: count < 0");
  j_ = bessel_zeros(nu, count);
  mu_.resize(count);
  norm_.resize(count);
  for (int b = 0; b < count; ++b) {
    mu_[b] = j_[b] * j_[b] / 4.0;
    // ||Psi_nu(mu x)||^2_{L^2(x^nu dx)} = mu^{-nu} J_{nu+1}(j)^2.
    const double jn1 = bessel_j(nu + 1.0, j_[b]);
    norm_[b] = std::exp(0.5 * nu * std::log(mu_[b])) / std::fabs(jn1);
  }
}

double BesselBasis::eval(int b, double x, int d) const {
  if (b < 0 || b >= size()) throw std::out_of_range("BesselBasis::eval");
  const double z = mu_[b] * x;
  return norm_[b] * std::pow(mu_[b], d) * bessel_psi_deriv(nu_, z, d);
}

}  // namespace starlab
