#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "starlab/field.hpp"
#include "starlab/rng.hpp"
#include "starlab/workspace.hpp"

using namespace starlab;

namespace {

double beta_fn(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

const Workspace& ws7() {
  static Workspace w([] {
    WorkspaceParams p;
    p.N = 7;
    return p;
  }());
  return w;
}

// smaller bases for the space-time sweeps
const Workspace& ws7small(int nt = 64) {
  static Workspace w64([] {
    WorkspaceParams p;
    p.N = 7;
    p.chart_modes = 32;
    p.global_modes = 20;
    p.nt = 64;
    return p;
  }());
  static Workspace w128([] {
    WorkspaceParams p;
    p.N = 7;
    p.chart_modes = 32;
    p.global_modes = 20;
    p.nt = 128;
    return p;
  }());
  return nt == 128 ? w128 : w64;
}

const Workspace& ws109() {
  static Workspace w([] {
    WorkspaceParams p;
    p.N = 109;
    p.chart_modes = 16;
    p.global_modes = 20;
    p.quad_points = 80;
    return p;
  }());
  return w;
}

// deep chart bases: the cutoff transition region resolves near 100 modes,
// after which the split tails drop geometrically
const Workspace& wsdeep() {
  static Workspace w([] {
    WorkspaceParams p;
    p.N = 7;
    p.chart_modes = 128;
    p.global_modes = 24;
    p.quad_points = 120;
    return p;
  }());
  return w;
}

Eigen::VectorXd decaying_coeffs(Rng& rng, int n, double rho) {
  Eigen::VectorXd c(n);
  double s = 1.0;
  for (int i = 0; i < n; ++i) {
    c[i] = s * rng.normal();
    s *= rho;
  }
  return c;
}

double weighted_l2(const QuadratureRule& rule, const Eigen::VectorXd& vals) {
  double s = 0.0;
  for (int i = 0; i < rule.size(); ++i) s += rule.weight[i] * vals[i] * vals[i];
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("composite rules integrate Jacobi moments exactly") {
  struct Probe {
    double p, q;
  };
  for (Probe pr : {Probe{0.0, 0.0}, Probe{1.5, 0.0}, Probe{2.5, 0.0},
                   Probe{1.5, 2.5}, Probe{1.5, 53.5}, Probe{53.5, 0.0}}) {
    QuadratureRule rule = Workspace::composite_rule(pr.p, pr.q, 60);
    for (int a : {0, 1, 2, 5, 12, 25}) {
      double got = 0.0;
      for (int i = 0; i < rule.size(); ++i)
        got += rule.weight[i] * std::pow(rule.node[i], a);
      const double want = beta_fn(pr.p + a + 1.0, pr.q + 1.0);
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }

  // cutoff transition is symmetric about its midpoint, so it integrates to 1/2
  QuadratureRule flat = Workspace::composite_rule(0.0, 0.0, 60);
  const Cutoff& om = ws7().partition_cutoff();
  double iom = 0.0;
  for (int i = 0; i < flat.size(); ++i) iom += flat.weight[i] * om.eval(flat.node[i]);
  CHECK(iom == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("workspace rejects integer N/2 and degenerate grids") {
  WorkspaceParams p;
  p.N = 8;
  bool threw = false;
  try {
    Workspace w(p);
  } catch (const std::domain_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("(B)") != std::string::npos);
  }
  CHECK(threw);

  p.N = 7;
  p.nt = 63;
  CHECK_THROWS_AS(Workspace{p}, std::invalid_argument);
  p.nt = 64;
  p.chart_modes = 2;
  CHECK_THROWS_AS(Workspace{p}, std::invalid_argument);

  CHECK_THROWS_AS(Chart(0, 8), std::domain_error);
  CHECK_THROWS_AS(Chart(2, 7), std::invalid_argument);
}

TEST_CASE("chart and global bases are orthonormal under the cached rules") {
  for (const Workspace* w : {&ws7(), &ws109()}) {
    for (int mu : {0, 1}) {
      const Eigen::MatrixXd& V = w->chart_basis_values(mu, 0);
      Eigen::VectorXd wt = Eigen::Map<const Eigen::VectorXd>(
          w->chart_rule(mu).weight.data(), w->chart_rule(mu).size());
      Eigen::MatrixXd G = V.transpose() * wt.asDiagonal() * V;
      G.diagonal().array() -= 1.0;
      CHECK(G.cwiseAbs().maxCoeff() <= 1e-9);
    }
    const Eigen::MatrixXd& P = w->global_basis_values(0);
    Eigen::VectorXd wt = Eigen::Map<const Eigen::VectorXd>(
        w->global_rule().weight.data(), w->global_rule().size());
    Eigen::MatrixXd G = P.transpose() * wt.asDiagonal() * P;
    G.diagonal().array() -= 1.0;
    CHECK(G.cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("nodal-spectral round trips are exact for band-limited data") {
  Rng rng(0x5eed01);
  for (int mu : {0, 1}) {
    GridFunction u{mu, decaying_coeffs(rng, ws7().params().chart_modes, 0.6), false};
    Eigen::VectorXd vals = chart_values(ws7(), u);
    GridFunction back = chart_project(ws7(), mu, vals);
    CHECK((back.coeff - u.coeff).cwiseAbs().maxCoeff() <=
          1e-10 * u.coeff.cwiseAbs().maxCoeff());
    CHECK_FALSE(back.degraded);
  }
  GlobalFunction g{decaying_coeffs(rng, ws7().params().global_modes, 0.55)};
  GlobalFunction gback = global_project(ws7(), global_values(ws7(), g));
  CHECK((gback.coeff - g.coeff).cwiseAbs().maxCoeff() <=
        1e-10 * g.coeff.cwiseAbs().maxCoeff());
}

TEST_CASE("plain chart norm equals the quadrature L2 norm") {
  Rng rng(0x5eed02);
  for (int mu : {0, 1}) {
    GridFunction u{mu, decaying_coeffs(rng, 32, 0.5), false};
    const double spectral = chart_norm(ws7(), u, 0);
    const double nodal = weighted_l2(ws7().chart_rule(mu), chart_values(ws7(), u));
    CHECK(spectral == doctest::Approx(nodal).epsilon(1e-9));
  }
}

TEST_CASE("diagonal laplacian agrees with nodal second derivatives") {
  Rng rng(0x5eed03);
  for (const Workspace* w : {&ws7(), &ws109()}) {
    for (int mu : {0, 1}) {
      const int B = w->params().chart_modes;
      GridFunction u{mu, decaying_coeffs(rng, B, 0.5), false};
      const double drift = w->chart(mu).drift();
      Eigen::VectorXd xi = Eigen::Map<const Eigen::VectorXd>(
          w->chart_rule(mu).node.data(), w->chart_rule(mu).size());
      Eigen::VectorXd nodal = xi.array() * chart_values(*w, u, 2).array() +
                              drift * chart_values(*w, u, 1).array();
      Eigen::VectorXd diag = chart_values(*w, apply_laplacian(*w, u));
      const double scale = weighted_l2(w->chart_rule(mu), nodal);
      CHECK(weighted_l2(w->chart_rule(mu), Eigen::VectorXd(diag - nodal)) <=
            1e-8 * scale);
    }
  }
}

TEST_CASE("sqrt-degeneracy derivative composes to laplacian minus drift defect") {
  // Ddot Ddot = lap - ((n-1)/2) D. The composition sqrt(xi) d/dxi (sqrt(xi) u')
  // is assembled nodally (u'/2 + xi u''); re-projecting the intermediate
  // sqrt(xi) u' onto the eigenbasis converges too slowly to compose spectrally
  // (half-integer power mismatch at xi=0), which is what `degraded` flags.
  Rng rng(0x5eed04);
  const Workspace& w = ws7();
  for (int mu : {0, 1}) {
    GridFunction u{mu, decaying_coeffs(rng, w.params().chart_modes, 0.6), false};
    Eigen::VectorXd xi = Eigen::Map<const Eigen::VectorXd>(
        w.chart_rule(mu).node.data(), w.chart_rule(mu).size());
    Eigen::VectorXd lhs = 0.5 * chart_values(w, u, 1) +
                          (xi.array() * chart_values(w, u, 2).array()).matrix();

    const double cdef = (w.chart(mu).model_n() - 1) / 2.0;
    Eigen::VectorXd rhs =
        chart_values(w, apply_laplacian(w, u)) - cdef * apply_d_values(w, u);

    const double scale = weighted_l2(w.chart_rule(mu), rhs);
    CHECK(weighted_l2(w.chart_rule(mu), Eigen::VectorXd(lhs - rhs)) <= 1e-8 * scale);
  }
}

TEST_CASE("projection of an incompatible derivative is flagged degraded") {
  Rng rng(0x5eed05);
  GridFunction u{0, decaying_coeffs(rng, 32, 0.6), false};
  GridFunction w = apply_sqrtx_d(ws7(), u);
  CHECK(w.degraded);  // sqrt(xi) u' does not vanish at xi=1 for generic u
}

TEST_CASE("degenerate derivative carries the x(1-x) factor and orientation") {
  Rng rng(0x5eed06);
  for (int mu : {0, 1}) {
    GridFunction u{mu, decaying_coeffs(rng, 32, 0.6), false};
    Eigen::VectorXd xi = Eigen::Map<const Eigen::VectorXd>(
        ws7().chart_rule(mu).node.data(), ws7().chart_rule(mu).size());
    const double sign = ws7().chart(mu).orientation();
    Eigen::VectorXd expect =
        sign * (xi.array() * (1.0 - xi.array()) * apply_d_values(ws7(), u).array());
    Eigen::VectorXd got = apply_degenerate_d_values(ws7(), u);
    CHECK((got - expect).cwiseAbs().maxCoeff() <= 1e-12 * expect.cwiseAbs().maxCoeff());
  }
  CHECK(ws7().chart(0).orientation() == 1);
  CHECK(ws7().chart(1).orientation() == -1);
}

TEST_CASE("norm ladder closed forms on eigenmodes") {
  for (int mu : {0, 1}) {
    const int B = ws7().params().chart_modes;
    for (int b : {0, 3, 11}) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(B);
      c[b] = 1.0;
      GridFunction u{mu, c, false};
      const double m = ws7().chart_basis(mu).mu(b);
      CHECK(chart_norm(ws7(), u, 0) == doctest::Approx(1.0).epsilon(1e-12));
      for (int k : {1, 2, 5}) {
        double s = 0.0, pw = 1.0;
        for (int l = 0; l <= k; ++l) {
          s += pw;
          pw *= m;
        }
        CHECK(chart_norm(ws7(), u, k) == doctest::Approx(std::sqrt(s)).epsilon(1e-12));
        CHECK(chart_seminorm(ws7(), u, k) ==
              doctest::Approx(std::pow(m, 0.5 * k)).epsilon(1e-12));
      }
      double st = 0.0, pw = 1.0;
      for (int mm = 0; mm <= 2; ++mm) {
        st += pw;
        pw *= m * m;
      }
      CHECK(chart_star_norm(ws7(), u, 2) == doctest::Approx(std::sqrt(st)).epsilon(1e-12));
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(B);
    c[0] = 1.0;
    c[1] = 1.0;
    CHECK(chart_norm(ws7(), GridFunction{mu, c, false}, 0) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  }
}

TEST_CASE("ladder seminorms equal operator norms on compatible pieces") {
  Rng rng(0x5eed07);
  GlobalFunction g{decaying_coeffs(rng, ws7().params().global_modes, 0.5)};
  auto [u0, u1] = split(ws7(), g);
  for (const GridFunction* u : {&u0, &u1}) {
    const int mu = u->chart;
    const double s1 = chart_seminorm(ws7(), *u, 1);
    const double n1 = weighted_l2(ws7().chart_rule(mu), apply_sqrtx_d_values(ws7(), *u));
    CHECK(s1 == doctest::Approx(n1).epsilon(1e-8));
    const double s2 = chart_seminorm(ws7(), *u, 2);
    const double n2 = weighted_l2(ws7().chart_rule(mu),
                                  chart_values(ws7(), apply_laplacian(ws7(), *u)));
    CHECK(s2 == doctest::Approx(n2).epsilon(1e-10));
  }
}

TEST_CASE("norms grow with the ladder index and reject short bases") {
  Rng rng(0x5eed08);
  GridFunction u{0, decaying_coeffs(rng, 32, 0.7), false};
  double prev = chart_norm(ws7(), u, 0);
  for (int k = 1; k <= 6; ++k) {
    const double cur = chart_norm(ws7(), u, k);
    CHECK(cur >= prev);
    prev = cur;
  }
  CHECK_THROWS_AS(chart_norm(ws7(), u, 31), std::invalid_argument);
}

TEST_CASE("split reconstructs the function and respects supports") {
  // The cutoff transition is stiff: its pieces need a deeper eigenbasis than
  // the working default before the expansion tails drop below 1e-8, so the
  // pointwise reconstruction checks run on the deep workspace and the default
  // resolution only has to beat a coarse envelope.
  Rng rng(0x5eed09);
  const int ng = wsdeep().params().global_modes;
  GlobalFunction g{decaying_coeffs(rng, ng, 0.5)};

  auto eval_global = [&](const Workspace& w, double x) {
    std::vector<double> stack(static_cast<size_t>(w.params().global_modes));
    w.global_basis().eval_stack(x, 0, stack.data());
    double ux = 0.0;
    for (int n = 0; n < w.params().global_modes; ++n)
      ux += g.coeff[n] * stack[static_cast<size_t>(n)];
    return ux;
  };
  auto eval_piece = [](const Workspace& w, const GridFunction& u, double xi) {
    double p = 0.0;
    for (int b = 0; b < w.params().chart_modes; ++b)
      p += u.coeff[b] * w.chart_basis(u.chart).eval(b, xi);
    return p;
  };

  auto [d0, d1] = split(wsdeep(), g);
  CHECK(d0.chart == 0);
  CHECK(d1.chart == 1);
  double worst = 0.0, leak = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double x = i / 21.0;
    const double ux = eval_global(wsdeep(), x);
    const double px = eval_piece(wsdeep(), d0, x) + eval_piece(wsdeep(), d1, 1.0 - x);
    worst = std::max(worst, std::abs(px - ux));
  }
  for (double x : {0.75, 0.9}) leak = std::max(leak, std::abs(eval_piece(wsdeep(), d0, x)));
  for (double x : {0.1, 0.25}) leak = std::max(leak, std::abs(eval_piece(wsdeep(), d1, 1.0 - x)));
  CHECK(worst <= 1e-8);
  CHECK(leak <= 1e-8);

  // coarse default: tails visible but small
  GlobalFunction gc{g.coeff.head(ws7small().params().global_modes).eval()};
  auto [c0, c1] = split(ws7small(), gc);
  double cworst = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double x = i / 21.0;
    const double ux = eval_global(ws7small(), x);
    cworst = std::max(
        cworst, std::abs(eval_piece(ws7small(), c0, x) +
                         eval_piece(ws7small(), c1, 1.0 - x) - ux));
  }
  CHECK(cworst <= 5e-2);
}

TEST_CASE("graded norm of a split function matches direct quadrature") {
  Rng rng(0x5eed0a);
  GlobalFunction g{decaying_coeffs(rng, ws7().params().global_modes, 0.5)};
  auto [u0, u1] = split(ws7(), g);
  double s = 0.0;
  for (const GridFunction* u : {&u0, &u1}) {
    const double n = weighted_l2(ws7().chart_rule(u->chart), chart_values(ws7(), *u));
    s += n * n;
  }
  CHECK(graded_norm(ws7(), g, 0) == doctest::Approx(std::sqrt(s)).epsilon(1e-9));

  // pair norm shifts only the first component
  GlobalFunction z{Eigen::VectorXd::Zero(g.coeff.size())};
  for (int k : {0, 2}) {
    CHECK(pair_norm(ws7(), g, z, k) == doctest::Approx(graded_norm(ws7(), g, k + 1)).epsilon(1e-12));
    CHECK(pair_norm(ws7(), z, g, k) == doctest::Approx(graded_norm(ws7(), g, k)).epsilon(1e-12));
  }
}

TEST_CASE("relocated chart-0 functions keep comparable chart-1 norms") {
  // u supported in [0, 2/3] on chart 0; chi u re-expanded on chart 1
  const Workspace& w = ws7();
  const Cutoff rise = Cutoff::rise(1.0 / 6.0, 1.0 / 3.0);
  const Cutoff fall = Cutoff::rise(5.0 / 12.0, 7.0 / 12.0);
  auto bump = [&](double x) { return rise.eval(x) * (1.0 - fall.eval(x)); };

  const auto& r0 = w.chart_rule(0);
  Eigen::VectorXd vals0(r0.size());
  for (int i = 0; i < r0.size(); ++i) vals0[i] = bump(r0.node[i]);
  GridFunction u = chart_project(w, 0, vals0);

  const auto& r1 = w.chart_rule(1);
  const Cutoff& chi = w.relocation_cutoff();
  Eigen::VectorXd vals1(r1.size());
  for (int i = 0; i < r1.size(); ++i) {
    const double x = 1.0 - r1.node[i];
    vals1[i] = chi.eval(x) * bump(x);
  }
  GridFunction cu = chart_project(w, 1, vals1);

  for (int k = 0; k <= 3; ++k) {
    const double ratio = chart_norm(w, cu, k) / chart_norm(w, u, k);
    CHECK(ratio > 0.0);
    CHECK(ratio < 50.0);
  }
}

namespace {

// y, v = sums of separated modes  sin(om t + ph) * (global coefficient row)
struct SeparatedField {
  std::vector<double> om, ph;
  std::vector<Eigen::VectorXd> ycoef, vcoef;

  PairField make(const Workspace& ws) const {
    const TimeGrid g = ws.time_grid();
    const int modes = static_cast<int>(om.size());
    PairField f;
    f.y = Eigen::MatrixXd::Zero(g.samples(), ws.params().global_modes);
    f.v = Eigen::MatrixXd::Zero(g.samples(), ws.params().global_modes);
    for (int i = 0; i < g.samples(); ++i)
      for (int a = 0; a < modes; ++a) {
        const double s = std::sin(om[a] * g.t(i) + ph[a]);
        f.y.row(i) += s * ycoef[a].transpose();
        f.v.row(i) += s * vcoef[a].transpose();
      }
    auto self = *this;
    f.deriv = [self, g, modes](int j, Eigen::MatrixXd& yj, Eigen::MatrixXd& vj) {
      yj.setZero();
      vj.setZero();
      for (int i = 0; i < g.samples(); ++i)
        for (int a = 0; a < modes; ++a) {
          const double s = std::pow(self.om[a], j) *
                           std::sin(self.om[a] * g.t(i) + self.ph[a] + j * M_PI_2);
          yj.row(i) += s * self.ycoef[a].transpose();
          vj.row(i) += s * self.vcoef[a].transpose();
        }
    };
    return f;
  }
};

SeparatedField random_field(Rng& rng, const Workspace& ws, double om_max) {
  SeparatedField f;
  const int modes = 3;
  for (int a = 0; a < modes; ++a) {
    f.om.push_back(om_max * (0.2 + 0.8 * rng.uniform()));
    f.ph.push_back(2.0 * M_PI * rng.uniform());
    f.ycoef.push_back(decaying_coeffs(rng, ws.params().global_modes, 0.45));
    f.vcoef.push_back(decaying_coeffs(rng, ws.params().global_modes, 0.45));
  }
  return f;
}

// independent evaluation of the even-calculus space-time norm: explicit
// loops over (iota, kappa), explicit split projection, Simpson in time
double norm2_oracle(const Workspace& ws, const SeparatedField& sf, int nu) {
  const TimeGrid g = ws.time_grid();
  const Eigen::VectorXd tw = time_integration_weights(g);
  const int nm = ws.params().global_modes;
  const int nb = ws.params().chart_modes;
  double total = 0.0;
  for (int iota = 0; 2 * iota <= 2 * nu; ++iota) {
    if (iota > nu) break;
    for (int kappa = 0; iota + kappa <= nu; ++kappa) {
      for (int i = 0; i < g.samples(); ++i) {
        for (int comp = 0; comp < 2; ++comp) {
          Eigen::VectorXd slice = Eigen::VectorXd::Zero(nm);
          for (size_t a = 0; a < sf.om.size(); ++a) {
            const double s =
                std::pow(sf.om[a], 2 * iota) *
                std::sin(sf.om[a] * g.t(i) + sf.ph[a] + 2 * iota * M_PI_2);
            slice += s * (comp == 0 ? sf.ycoef[a] : sf.vcoef[a]);
          }
          for (int mu = 0; mu < 2; ++mu) {
            const auto& rule = ws.chart_rule(mu);
            Eigen::VectorXd piece(rule.size());
            for (int q = 0; q < rule.size(); ++q) {
              double val = 0.0;
              for (int n = 0; n < nm; ++n)
                val += slice[n] * ws.global_at_chart(mu, 0)(q, n);
              const double x = ws.chart(mu).global(rule.node[q]);
              const double cut = ws.partition_cutoff().eval(x);
              piece[q] = (mu == 0 ? cut : 1.0 - cut) * val;
            }
            Eigen::VectorXd cb = Eigen::VectorXd::Zero(nb);
            for (int b = 0; b < nb; ++b)
              for (int q = 0; q < rule.size(); ++q)
                cb[b] += rule.weight[q] * ws.chart_basis_values(mu, 0)(q, b) * piece[q];
            double star2 = 0.0;
            for (int m = 0; m <= kappa; ++m)
              for (int b = 0; b < nb; ++b)
                star2 += std::pow(ws.chart_basis(mu).mu(b), 2 * m) * cb[b] * cb[b];
            total += tw[i] * star2;
          }
        }
      }
    }
  }
  return std::sqrt(total);
}

}  // namespace

TEST_CASE("even-calculus space-time norm matches a term-by-term oracle") {
  Rng rng(0x5eed0b);
  const Workspace& w = ws7small();
  for (int trial = 0; trial < 3; ++trial) {
    SeparatedField sf = random_field(rng, w, 5.0);
    PairField f = sf.make(w);
    for (int nu : {0, 1, 2}) {
      const double got = norm2(w, f, nu);
      const double want = norm2_oracle(w, sf, nu);
      CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("time norms satisfy the interleaving inequalities") {
  Rng rng(0x5eed0c);
  const Workspace& w = ws7small();
  const double T = w.params().T;
  double worst_left01 = 0.0, worst_right01 = 0.0;
  double worst_left02 = 0.0, worst_right02 = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    SeparatedField sf = random_field(rng, w, 5.0);
    PairField f = sf.make(w);

    const int n = 2;
    const double intn = integral_norm(w, f, n);
    const double intn1 = integral_norm(w, f, n + 1);
    const double supn = sup_norm(w, f, T, n);
    worst_left01 = std::max(worst_left01, intn / supn);
    worst_right01 = std::max(worst_right01, supn / intn1);

    const int nu = 1;
    const double n2 = norm2(w, f, nu);
    worst_left02 = std::max(worst_left02, integral_norm(w, f, 2 * nu - 1) / n2);
    worst_right02 = std::max(worst_right02, n2 / integral_norm(w, f, 2 * nu));
  }
  // constants depend only on T and the ladder depth; generous envelopes
  CHECK(worst_left01 <= 2.0);
  CHECK(worst_right01 <= 40.0);
  CHECK(worst_left02 <= 10.0);
  CHECK(worst_right02 <= 10.0);

  // ratios are stable when the time grid is refined
  SeparatedField sf = random_field(rng, w, 5.0);
  const Workspace& wf = ws7small(128);
  PairField fc = sf.make(w);
  PairField ff = sf.make(wf);
  for (int nu : {1}) {
    const double rc = integral_norm(w, fc, 2 * nu - 1) / norm2(w, fc, nu);
    const double rf = integral_norm(wf, ff, 2 * nu - 1) / norm2(wf, ff, nu);
    CHECK(rc == doctest::Approx(rf).epsilon(1e-4));
  }
}

TEST_CASE("sup norm is monotone in the horizon and uses the pair ladder") {
  Rng rng(0x5eed0d);
  const Workspace& w = ws7small();
  SeparatedField sf = random_field(rng, w, 5.0);
  PairField f = sf.make(w);
  const double full = sup_norm(w, f, w.params().T, 2);
  const double half = sup_norm(w, f, 0.5 * w.params().T, 2);
  CHECK(half <= full * (1.0 + 1e-12));
  CHECK(full > 0.0);
}

TEST_CASE("finite-difference fallback matches analytic derivatives") {
  Rng rng(0x5eed0e);
  const Workspace& w = ws7small();
  SeparatedField sf = random_field(rng, w, 2.0);
  PairField exact = sf.make(w);
  PairField fd = sf.make(w);
  fd.deriv = nullptr;
  for (int n : {1, 2, 3}) {
    const double a = integral_norm(w, exact, n);
    const double b = integral_norm(w, fd, n);
    CHECK(a == doctest::Approx(b).epsilon(1e-4));
  }
  CHECK_THROWS_AS(sup_norm(w, fd, w.params().T, 5), std::invalid_argument);
}

TEST_CASE("finite-difference stencils are exact on polynomials") {
  TimeGrid g{1.0, 16};
  Eigen::MatrixXd f(g.samples(), 1);
  for (int i = 0; i < g.samples(); ++i) f(i, 0) = std::pow(g.t(i), 4);
  Eigen::MatrixXd d1 = fd_time_derivative(g, f, 1);
  Eigen::MatrixXd d2 = fd_time_derivative(g, f, 2);
  Eigen::MatrixXd d4 = fd_time_derivative(g, f, 4);
  for (int i = 0; i < g.samples(); ++i) {
    const double t = g.t(i);
    CHECK(d1(i, 0) == doctest::Approx(4.0 * t * t * t).epsilon(1e-9));
    CHECK(d2(i, 0) == doctest::Approx(12.0 * t * t).epsilon(1e-9));
    CHECK(d4(i, 0) == doctest::Approx(24.0).epsilon(1e-9));
  }
}

TEST_CASE("time integration weights reproduce smooth integrals") {
  TimeGrid g{1.0, 64};
  Eigen::VectorXd tw = time_integration_weights(g);
  CHECK(tw.sum() == doctest::Approx(1.0).epsilon(1e-14));
  double s = 0.0;
  for (int i = 0; i < g.samples(); ++i) {
    const double v = std::sin(M_PI * g.t(i));
    s += tw[i] * v * v;
  }
  CHECK(s == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_THROWS_AS(time_integration_weights(TimeGrid{1.0, 63}), std::invalid_argument);
}

TEST_CASE("tail fraction separates resolved from saturated data") {
  Eigen::VectorXd low = Eigen::VectorXd::Zero(32);
  low[0] = 1.0;
  low[1] = 0.5;
  CHECK(tail_fraction(GridFunction{0, low, false}) <= 1e-16);
  Eigen::VectorXd top = Eigen::VectorXd::Zero(32);
  top[31] = 1.0;
  CHECK(tail_fraction(GridFunction{0, top, false}) == doctest::Approx(1.0));
}
