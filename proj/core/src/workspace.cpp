#include "starlab/workspace.hpp"

#include <cmath>
#include <stdexcept>

namespace starlab {

QuadratureRule Workspace::composite_rule(double p, double q, int pts_per_segment) {
  if (pts_per_segment < 2) throw std::invalid_argument("composite rule needs >= 2 points per segment");
  static const double knots[] = {0.0, 1.0 / 6.0, 1.0 / 3.0, 2.0 / 3.0, 5.0 / 6.0, 1.0};
  QuadratureRule out;
  out.p = p;
  out.q = q;
  for (int seg = 0; seg < 5; ++seg) {
    const double a = knots[seg], b = knots[seg + 1];
    if (seg == 0 && p != 0.0) {
      QuadratureRule base = gauss_jacobi_rule(pts_per_segment, p, 0.0);
      const double s = std::pow(b, p + 1.0);
      for (int i = 0; i < base.size(); ++i) {
        const double x = b * base.node[i];
        out.node.push_back(x);
        out.weight.push_back(s * base.weight[i] * std::pow(1.0 - x, q));
      }
    } else if (seg == 4 && q != 0.0) {
      QuadratureRule base = gauss_jacobi_rule(pts_per_segment, q, 0.0);
      const double s = std::pow(1.0 - a, q + 1.0);
      for (int i = base.size(); i-- > 0;) {
        const double x = 1.0 - (1.0 - a) * base.node[i];
        out.node.push_back(x);
        out.weight.push_back(s * base.weight[i] * std::pow(x, p));
      }
    } else {
      QuadratureRule base = gauss_jacobi_rule(pts_per_segment, 0.0, 0.0);
      for (int i = 0; i < base.size(); ++i) {
        const double x = a + (b - a) * base.node[i];
        out.node.push_back(x);
        out.weight.push_back((b - a) * base.weight[i] * std::pow(x, p) * std::pow(1.0 - x, q));
      }
    }
  }
  return out;
}

Workspace::Workspace(WorkspaceParams p) : par_(p) {
  if (p.N < 1 || p.N % 2 == 0)
    throw std::domain_error(
        "N must be a positive odd integer: integer N/2 is the excluded "
        "analytic-boundary case (B)");
  if (p.chart_modes < 4 || p.global_modes < 4)
    throw std::invalid_argument("need at least 4 modes per basis");
  if (p.nt < 8 || p.nt % 2 != 0) throw std::invalid_argument("nt must be even and >= 8");
  if (!(p.T > 0.0)) throw std::invalid_argument("T must be positive");

  omega_ = Cutoff::partition();
  chi_ = Cutoff::relocation();

  gbasis_ = OrthoBasis(p.global_modes, 1.5, 0.5 * p.N - 1.0);
  grule_ = composite_rule(1.5, 0.5 * p.N - 1.0, p.quad_points);
  {
    const int n = grule_.size(), m = p.global_modes;
    for (int d = 0; d <= 2; ++d) gvals_[d].resize(n, m);
    std::vector<double> buf(3 * static_cast<std::size_t>(m));
    for (int i = 0; i < n; ++i) {
      gbasis_.eval_stack(grule_.node[i], 2, buf.data());
      for (int d = 0; d <= 2; ++d)
        for (int k = 0; k < m; ++k) gvals_[d](i, k) = buf[static_cast<std::size_t>(d) * m + k];
    }
  }

  for (int mu = 0; mu <= 1; ++mu) {
    const Chart ch(mu, p.N);
    const double nu = ch.weight_exponent();
    crule_[mu] = composite_rule(nu, 0.0, p.quad_points);
    cbasis_[mu] = BesselBasis(nu, p.chart_modes);

    const int n = crule_[mu].size(), B = p.chart_modes, m = p.global_modes;
    for (int d = 0; d <= 2; ++d) {
      cvals_[mu][d].resize(n, B);
      gatc_[mu][d].resize(n, m);
    }
    cutc_[mu].resize(n);
    std::vector<double> buf(3 * static_cast<std::size_t>(m));
    for (int i = 0; i < n; ++i) {
      const double xi = crule_[mu].node[i];
      const double x = ch.global(xi);
      for (int d = 0; d <= 2; ++d)
        for (int b = 0; b < B; ++b) cvals_[mu][d](i, b) = cbasis_[mu].eval(b, xi, d);
      gbasis_.eval_stack(x, 2, buf.data());
      for (int d = 0; d <= 2; ++d)
        for (int k = 0; k < m; ++k) gatc_[mu][d](i, k) = buf[static_cast<std::size_t>(d) * m + k];
      const double w = omega_.eval(x);
      cutc_[mu](i) = mu == 0 ? w : 1.0 - w;
    }

    Eigen::Map<const Eigen::VectorXd> wts(crule_[mu].weight.data(), n);
    split_[mu] = cvals_[mu][0].transpose() *
                 (wts.cwiseProduct(cutc_[mu]).asDiagonal() * gatc_[mu][0]);
  }
}

}  // namespace starlab
