#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <vector>

#include "starlab/calculus.hpp"
#include "starlab/field.hpp"
#include "starlab/io.hpp"
#include "starlab/workspace.hpp"

namespace starlab {

// Double eigenexpansion of a space-time extension supported in (-2T,2T) in
// time and compactly in the chart coordinate: entry (a-1, b-1) multiplies
// the sine mode of time index a and the chart eigenmode psi_b. time_cap and
// mode_cap bound the indices the representation can hold, so truncating
// below them is exact, never aliased.
struct ExtendedField {
  int chart = 0;
  Eigen::MatrixXd c;  // time_cap rows, mode_cap columns
  int time_cap = 0;
  int mode_cap = 0;
};

// One chart component sampled on the workspace time grid; row i holds the
// chart eigenbasis coefficients at t_i. `time_derivative`, when present,
// returns exact j-th time-derivative rows. `spectral` carries the field's
// extended representation when one is known exactly (outputs of smooth(),
// mode_field()); extension-based operations reuse it instead of rebuilding
// an extension from samples, which keeps band-limited fields closed under
// smoothing.
struct ChartTimeField {
  int chart = 0;
  Eigen::MatrixXd coeff;  // nt+1 rows, chart_modes columns
  std::function<Eigen::MatrixXd(int)> time_derivative;
  std::shared_ptr<const ExtendedField> spectral;
};

// largest representable time index, 4*nt - 1
int extension_time_cap(const Workspace& ws);
// eigenvalue (a pi / 4T)^2 of time mode a under -d^2/dt^2
double time_eigenvalue(const Workspace& ws, int a);
// exact-truncation ceiling (min(time cap, chart modes))^2; smoothing levels
// above it would need modes the representation cannot hold
double smoothing_cap(const Workspace& ws);

// the separated mode sin_a(t) psi_b(xi) restricted to the sample grid,
// carrying its exact spectral representation
ChartTimeField mode_field(const Workspace& ws, int mu, int a, int b);

// Extension of a cutoff chart component to the doubled time interval. The
// input must vanish past chart coordinate 2/3 up to a small projection
// tail. Time modes 4k restrict to the grid sines on [0,T], which are
// orthogonal under the sample sum, so that band is projected out exactly
// and in-band fields reproduce to machine accuracy; the remainder is
// carried outward by a dilated reflection with six matched moments and a
// soft C^6 taper. Restriction to [0,T] returns the input samples
// identically; the norm equivalence ratio against chart_norm2 is
// resolution independent but grows with the field's time frequency
// content (the reflected wings are degree-5 extrapolations).
ExtendedField extend(const Workspace& ws, const ChartTimeField& u);

// zero every entry with a^2 > theta or b^2 > theta (pure projection)
ExtendedField truncate_modes(const ExtendedField& u, double theta);

// samples of the reconstruction on the [0,T] grid, with exact analytic
// time derivatives and the representation attached as `spectral`
ChartTimeField restrict_to_grid(const Workspace& ws, const ExtendedField& u);

// extend, truncate at level theta, restrict. Fields carrying a spectral
// representation are truncated directly, which makes repeated smoothing
// satisfy the exact projection laws S(t)S(t') = S(min(t,t')). Requires
// 0 <= theta <= smoothing_cap(ws).
ChartTimeField smooth(const Workspace& ws, const ChartTimeField& u, double theta);

// componentwise smoothing of a global pair field: split each time slice
// into chart components, smooth both, recombine by global projection.
// The result carries exact time derivatives (its chart pieces are
// band-limited sine sums).
PairField smooth_pair(const Workspace& ws, const PairField& u, double theta);

// ( sum_{i+k<=nu} sum_ab lambda_a^{2i} mu_b^{2k} c_ab^2 )^{1/2}
double sharp_norm(const Workspace& ws, const ExtendedField& u, int nu);

// graded space-time norm of one chart component,
// ( sum_{i+k<=nu} int_0^T ||d_t^{2i} u(t)||*_k^2 dt )^{1/2};
// sampled fields without analytic derivatives support nu <= 2
double chart_norm2(const Workspace& ws, const ChartTimeField& u, int nu);

// Empirical verification of the two truncation bounds on synthetic
// coefficient fields: ||S(theta)u||_nubar <= C theta^(nubar-nu) ||u||_nu
// (id "smoothing_direct_bound") and ||(I-S(theta))u||_nu <=
// C theta^(nu-nubar) ||u||_nubar (id "smoothing_remainder_bound"), one
// report per chart and bound. Trial ensembles concentrate energy along
// index shells so the fitted log-log slope of the numerator against theta
// isolates the advertised exponent; parameters carry the per-theta ratios,
// the fitted slope, its expected value, and the proof constant
// (nubar - nu + 1). The resolution sweep re-runs the same trials under
// reduced mode caps. theta_grid entries must lie in [1, smoothing_cap].
std::vector<InequalityReport> verify_smoothing_estimates(
    const Workspace& ws, int nu, int nu_bar, const std::vector<double>& theta_grid,
    int trials);

// coefficient dump with columns a, b, c_ab, in a-major order
CsvWriter coefficient_table(const ExtendedField& u);

}  // namespace starlab
