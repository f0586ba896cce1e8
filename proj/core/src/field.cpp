#include "starlab/field.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace starlab {

namespace {

Eigen::Map<const Eigen::VectorXd> weights_of(const QuadratureRule& r) {
  return {r.weight.data(), static_cast<Eigen::Index>(r.weight.size())};
}

Eigen::Map<const Eigen::VectorXd> nodes_of(const QuadratureRule& r) {
  return {r.node.data(), static_cast<Eigen::Index>(r.node.size())};
}

Eigen::Map<const Eigen::VectorXd> mus_of(const Workspace& ws, int mu) {
  const auto& m = ws.chart_basis(mu).mus();
  return {m.data(), static_cast<Eigen::Index>(m.size())};
}

void check_chart(const GridFunction& u) {
  if (u.chart != 0 && u.chart != 1) throw std::invalid_argument("chart tag must be 0 or 1");
}

// sum_{l<=k} mu^l per mode (the diagonal ladder weight of the k-norm)
Eigen::ArrayXd ladder_weights(const Workspace& ws, int mu, int k) {
  Eigen::ArrayXd m = mus_of(ws, mu).array();
  Eigen::ArrayXd pw = Eigen::ArrayXd::Ones(m.size());
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(m.size());
  for (int l = 0; l <= k; ++l) {
    acc += pw;
    pw *= m;
  }
  return acc;
}

constexpr double kTailWarn = 1e-8;

GridFunction project_with_flag(const Workspace& ws, int mu, const Eigen::VectorXd& nodal) {
  GridFunction g = chart_project(ws, mu, nodal);
  g.degraded = tail_fraction(g) > kTailWarn;
  return g;
}

}  // namespace

GridFunction chart_project(const Workspace& ws, int mu, const Eigen::VectorXd& nodal) {
  const auto& rule = ws.chart_rule(mu);
  if (nodal.size() != rule.size()) throw std::invalid_argument("nodal size does not match the chart rule");
  GridFunction g;
  g.chart = mu;
  g.coeff = ws.chart_basis_values(mu, 0).transpose() * weights_of(rule).cwiseProduct(nodal);
  return g;
}

Eigen::VectorXd chart_values(const Workspace& ws, const GridFunction& u, int d) {
  check_chart(u);
  if (d < 0 || d > 2) throw std::invalid_argument("chart_values supports d <= 2");
  return ws.chart_basis_values(u.chart, d) * u.coeff;
}

GlobalFunction global_project(const Workspace& ws, const Eigen::VectorXd& nodal) {
  const auto& rule = ws.global_rule();
  if (nodal.size() != rule.size()) throw std::invalid_argument("nodal size does not match the global rule");
  GlobalFunction g;
  g.coeff = ws.global_basis_values(0).transpose() * weights_of(rule).cwiseProduct(nodal);
  return g;
}

Eigen::VectorXd global_values(const Workspace& ws, const GlobalFunction& u, int d) {
  if (d < 0 || d > 2) throw std::invalid_argument("global_values supports d <= 2");
  return ws.global_basis_values(d) * u.coeff;
}

double tail_fraction(const GridFunction& u) {
  const Eigen::Index n = u.coeff.size();
  if (n < 3) return 0.0;
  const double total = u.coeff.squaredNorm();
  if (total == 0.0) return 0.0;
  return u.coeff.tail(2).squaredNorm() / total;
}

std::pair<GridFunction, GridFunction> split(const Workspace& ws, const GlobalFunction& u) {
  GridFunction a, b;
  a.chart = 0;
  b.chart = 1;
  a.coeff = ws.split_matrix(0) * u.coeff;
  b.coeff = ws.split_matrix(1) * u.coeff;
  return {a, b};
}

GridFunction apply_laplacian(const Workspace& ws, const GridFunction& u) {
  check_chart(u);
  GridFunction r;
  r.chart = u.chart;
  r.coeff = -(mus_of(ws, u.chart).array() * u.coeff.array()).matrix();
  r.degraded = u.degraded || tail_fraction(u) > kTailWarn;
  return r;
}

Eigen::VectorXd apply_sqrtx_d_values(const Workspace& ws, const GridFunction& u) {
  check_chart(u);
  Eigen::VectorXd du = ws.chart_basis_values(u.chart, 1) * u.coeff;
  return (nodes_of(ws.chart_rule(u.chart)).array().sqrt() * du.array()).matrix();
}

GridFunction apply_sqrtx_d(const Workspace& ws, const GridFunction& u) {
  GridFunction r = project_with_flag(ws, u.chart, apply_sqrtx_d_values(ws, u));
  r.degraded = r.degraded || u.degraded;
  return r;
}

Eigen::VectorXd apply_d_values(const Workspace& ws, const GridFunction& u) {
  check_chart(u);
  return ws.chart_basis_values(u.chart, 1) * u.coeff;
}

GridFunction apply_d(const Workspace& ws, const GridFunction& u) {
  GridFunction r = project_with_flag(ws, u.chart, apply_d_values(ws, u));
  r.degraded = r.degraded || u.degraded;
  return r;
}

Eigen::VectorXd apply_degenerate_d_values(const Workspace& ws, const GridFunction& u) {
  check_chart(u);
  const double sign = ws.chart(u.chart).orientation();
  Eigen::ArrayXd xi = nodes_of(ws.chart_rule(u.chart)).array();
  Eigen::VectorXd du = ws.chart_basis_values(u.chart, 1) * u.coeff;
  return (sign * xi * (1.0 - xi) * du.array()).matrix();
}

GridFunction apply_degenerate_d(const Workspace& ws, const GridFunction& u) {
  GridFunction r = project_with_flag(ws, u.chart, apply_degenerate_d_values(ws, u));
  r.degraded = r.degraded || u.degraded;
  return r;
}

double chart_seminorm(const Workspace& ws, const GridFunction& u, int ell) {
  check_chart(u);
  if (ell < 0) throw std::invalid_argument("seminorm order must be >= 0");
  Eigen::ArrayXd m = mus_of(ws, u.chart).array();
  return std::sqrt((u.coeff.array().square() * m.pow(ell)).sum());
}

double chart_norm(const Workspace& ws, const GridFunction& u, int k) {
  check_chart(u);
  if (k < 0) throw std::invalid_argument("norm order must be >= 0");
  if (ws.params().chart_modes < k + 2)
    throw std::invalid_argument("under-resolved: norm order k needs at least k+2 chart modes");
  return std::sqrt((u.coeff.array().square() * ladder_weights(ws, u.chart, k)).sum());
}

double chart_star_norm(const Workspace& ws, const GridFunction& u, int kappa) {
  check_chart(u);
  if (kappa < 0) throw std::invalid_argument("norm order must be >= 0");
  Eigen::ArrayXd m2 = mus_of(ws, u.chart).array().square();
  Eigen::ArrayXd pw = Eigen::ArrayXd::Ones(m2.size());
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(m2.size());
  for (int m = 0; m <= kappa; ++m) {
    acc += pw;
    pw *= m2;
  }
  return std::sqrt((u.coeff.array().square() * acc).sum());
}

double graded_norm(const Workspace& ws, const GlobalFunction& u, int k) {
  auto [a, b] = split(ws, u);
  const double na = chart_norm(ws, a, k), nb = chart_norm(ws, b, k);
  return std::sqrt(na * na + nb * nb);
}

double star_norm(const Workspace& ws, const GlobalFunction& u, int kappa) {
  auto [a, b] = split(ws, u);
  const double na = chart_star_norm(ws, a, kappa), nb = chart_star_norm(ws, b, kappa);
  return std::sqrt(na * na + nb * nb);
}

double pair_norm(const Workspace& ws, const GlobalFunction& y, const GlobalFunction& v, int k) {
  const double ny = graded_norm(ws, y, k + 1), nv = graded_norm(ws, v, k);
  return std::sqrt(ny * ny + nv * nv);
}

// ---------------------------------------------------------------------------

namespace {

// Fornberg finite-difference weights for the m-th derivative at x0
void fd_weights(const std::vector<double>& a, double x0, int m, std::vector<double>& w) {
  const int n = static_cast<int>(a.size());
  std::vector<double> C(static_cast<std::size_t>(n) * (m + 1), 0.0);
  auto at = [&](int i, int k) -> double& { return C[static_cast<std::size_t>(i) * (m + 1) + k]; };
  double c1 = 1.0, c4 = a[0] - x0;
  at(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0, c5 = c4;
    c4 = a[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = a[i] - a[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) at(i, k) = c1 * (k * at(i - 1, k - 1) - c5 * at(i - 1, k)) / c2;
        at(i, 0) = -c1 * c5 * at(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) at(j, k) = (c4 * at(j, k) - k * at(j, k - 1)) / c3;
      at(j, 0) = c4 * at(j, 0) / c3;
    }
    c1 = c2;
  }
  w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = at(i, m);
}

void time_derivatives(const Workspace& ws, const PairField& u, int j, Eigen::MatrixXd& yj,
                      Eigen::MatrixXd& vj) {
  if (j == 0) {
    yj = u.y;
    vj = u.v;
    return;
  }
  if (u.deriv) {
    yj.resize(u.y.rows(), u.y.cols());
    vj.resize(u.v.rows(), u.v.cols());
    u.deriv(j, yj, vj);
    return;
  }
  if (j > 4)
    throw std::invalid_argument(
        "under-resolved in t: sampled fields support time derivatives up to "
        "order 4; higher orders need an analytic provider");
  const TimeGrid g = ws.time_grid();
  yj = fd_time_derivative(g, u.y, j);
  vj = fd_time_derivative(g, u.v, j);
}

void check_field(const Workspace& ws, const PairField& u) {
  const int rows = ws.time_grid().samples();
  if (u.y.rows() != rows || u.v.rows() != rows)
    throw std::invalid_argument("field rows do not match the time grid");
  if (u.y.cols() != ws.params().global_modes || u.v.cols() != ws.params().global_modes)
    throw std::invalid_argument("field columns do not match the global basis");
}

}  // namespace

Eigen::MatrixXd fd_time_derivative(const TimeGrid& g, const Eigen::MatrixXd& f, int j) {
  if (j == 0) return f;
  const int n = static_cast<int>(f.rows());
  const int pts = std::min(n, j + 5);
  Eigen::MatrixXd out(n, f.cols());
  std::vector<double> a(static_cast<std::size_t>(pts)), w;
  for (int i = 0; i < n; ++i) {
    int lo = std::max(0, std::min(i - pts / 2, n - pts));
    for (int q = 0; q < pts; ++q) a[static_cast<std::size_t>(q)] = g.t(lo + q);
    fd_weights(a, g.t(i), j, w);
    out.row(i).setZero();
    for (int q = 0; q < pts; ++q) out.row(i) += w[static_cast<std::size_t>(q)] * f.row(lo + q);
  }
  return out;
}

Eigen::VectorXd time_integration_weights(const TimeGrid& g) {
  if (g.nt % 2 != 0) throw std::invalid_argument("Simpson weights need an even step count");
  Eigen::VectorXd w(g.samples());
  const double h = g.dt();
  w.setConstant(2.0 * h / 3.0);
  for (int i = 1; i < g.nt; i += 2) w(i) = 4.0 * h / 3.0;
  w(0) = w(g.nt) = h / 3.0;
  return w;
}

double norm2(const Workspace& ws, const PairField& u, int nu) {
  if (nu < 0) throw std::invalid_argument("norm order must be >= 0");
  check_field(ws, u);
  if (ws.params().chart_modes < 2 * nu + 2)
    throw std::invalid_argument("under-resolved: order nu needs at least 2nu+2 chart modes");
  const Eigen::VectorXd tw = time_integration_weights(ws.time_grid());
  double total = 0.0;
  for (int i = 0; i <= nu; ++i) {
    Eigen::MatrixXd yi, vi;
    time_derivatives(ws, u, 2 * i, yi, vi);
    for (const Eigen::MatrixXd* comp : {&yi, &vi}) {
      for (int mu = 0; mu <= 1; ++mu) {
        const Eigen::MatrixXd c = *comp * ws.split_matrix(mu).transpose();
        const Eigen::ArrayXXd c2 = c.array().square();
        Eigen::ArrayXd m2 = mus_of(ws, mu).array().square();
        Eigen::ArrayXd pw = Eigen::ArrayXd::Ones(m2.size());
        for (int m = 0; m <= nu - i; ++m) {
          // multiplicity of ||lap^m .||^2 across kappa = m..nu-i
          const double mult = nu - i - m + 1;
          const Eigen::VectorXd s = (c2.rowwise() * pw.transpose()).rowwise().sum().matrix();
          total += mult * tw.dot(s);
          pw *= m2;
        }
      }
    }
  }
  return std::sqrt(total);
}

namespace {

// per-slice pair ladder norms ||(y,v)(t_i)||_{[mu]k} for all k <= n
// rows: time samples, cols: k
Eigen::MatrixXd pair_ladder_table(const Workspace& ws, int mu, const Eigen::MatrixXd& yc,
                                  const Eigen::MatrixXd& vc, int n) {
  const Eigen::ArrayXXd y2 = yc.array().square();
  const Eigen::ArrayXXd v2 = vc.array().square();
  Eigen::ArrayXd m = mus_of(ws, mu).array();
  Eigen::MatrixXd out(yc.rows(), n + 1);
  Eigen::ArrayXd pw = Eigen::ArrayXd::Ones(m.size());
  // cumulative ladders: norm_k^2 = sum_{l<=k} <.>_l^2, with y one order ahead
  Eigen::VectorXd ay = (y2.rowwise() * pw.transpose()).rowwise().sum().matrix();
  Eigen::VectorXd av = Eigen::VectorXd::Zero(yc.rows());
  for (int k = 0; k <= n; ++k) {
    av += (v2.rowwise() * pw.transpose()).rowwise().sum().matrix();
    pw *= m;
    ay += (y2.rowwise() * pw.transpose()).rowwise().sum().matrix();
    out.col(k) = (ay + av).array().sqrt().matrix();
  }
  return out;
}

double combined_time_norm(const Workspace& ws, const PairField& u, double tau, int n, bool sup) {
  check_field(ws, u);
  if (n < 0) throw std::invalid_argument("norm order must be >= 0");
  if (ws.params().chart_modes < n + 3)
    throw std::invalid_argument("under-resolved: order n needs at least n+3 chart modes");
  const TimeGrid g = ws.time_grid();
  const Eigen::VectorXd tw = time_integration_weights(g);
  double acc[2] = {0.0, 0.0};
  // ladder tables per derivative order and chart
  std::vector<Eigen::MatrixXd> tab[2];
  for (int j = 0; j <= n; ++j) {
    Eigen::MatrixXd yj, vj;
    time_derivatives(ws, u, j, yj, vj);
    for (int mu = 0; mu <= 1; ++mu) {
      const Eigen::MatrixXd yc = yj * ws.split_matrix(mu).transpose();
      const Eigen::MatrixXd vc = vj * ws.split_matrix(mu).transpose();
      tab[mu].push_back(pair_ladder_table(ws, mu, yc, vc, n - j));
    }
  }
  for (int mu = 0; mu <= 1; ++mu) {
    if (sup) {
      double best = 0.0;
      for (int i = 0; i < g.samples(); ++i) {
        if (g.t(i) > tau * (1.0 + 1e-12)) break;
        double s = 0.0;
        for (int j = 0; j <= n; ++j)
          for (int k = 0; k <= n - j; ++k) s += tab[mu][static_cast<std::size_t>(j)](i, k);
        best = std::max(best, s);
      }
      acc[mu] = best;
    } else {
      double s = 0.0;
      for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n - j; ++k)
          s += tw.dot(tab[mu][static_cast<std::size_t>(j)].col(k).array().square().matrix());
      acc[mu] = s;
    }
  }
  return sup ? std::hypot(acc[0], acc[1]) : std::sqrt(acc[0] + acc[1]);
}

}  // namespace

double sup_norm(const Workspace& ws, const PairField& u, double tau, int n) {
  return combined_time_norm(ws, u, tau, n, true);
}

double integral_norm(const Workspace& ws, const PairField& u, int n) {
  return combined_time_norm(ws, u, ws.time_grid().T, n, false);
}

}  // namespace starlab
