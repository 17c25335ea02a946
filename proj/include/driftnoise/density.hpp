#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "driftnoise/quadrature.hpp"

namespace driftnoise::density {

/// Parameters of the conditional density of the increment at the bridge
/// midpoint: a and b are the increments at the window edges, epsilon the
/// level time scale.  All strictly positive.
struct DensityParams {
    double a = 1.0;
    double b = 1.0;
    double epsilon = 1.0;

    void validate() const;
};

struct DensityValue {
    double value = 0.0;
    bool saturated = false;  // an exponent over/underflowed and the value was clamped to 0
};

/// Conditional density of the midpoint increment given the edge increments
/// and the stay-positive event:
///   p(x) = (1-e^{-2ax/eps})(1-e^{-2bx/eps})/(1-e^{-ab/eps})
///          * exp(-(x-(a+b)/2)^2/eps) / sqrt(pi*eps)   for x > 0, else 0.
/// Evaluated with expm1 so small exponents keep full precision; never NaN.
DensityValue midpoint_density_checked(const DensityParams& params, double x);
double midpoint_density(const DensityParams& params, double x);

/// Integrates the density over (0, (a+b)/2 + 12 sqrt(eps)) adaptively, adds
/// an analytic Gaussian tail bound, and checks |integral - 1| <= tol.
/// Returns the integral; throws NumericalError when the check fails and
/// QuadratureError when the quadrature itself does not converge.
double normalize_check(const DensityParams& params, double tol);

/// CDF values F(x_i) for ascending x via piecewise adaptive quadrature.
std::vector<double> density_cdf_at(const DensityParams& params, std::span<const double> sorted_xs,
                                   double tol = 1e-9);

/// Density-level epsilon-goodness: true iff some window [x, x+eps] inside
/// [lo,hi] has density >= eps at every probe point.  A passing window is
/// re-checked on a 3x finer probe grid (the refinement guard) before the
/// verdict is accepted.
bool epsilon_goodness(const std::function<double(double)>& density, double eps, double lo, double hi, int grid);

struct GoodnessReport {
    double epsilon_star = 0.0;  // min(margin, 1)
    double witness_x = 0.0;     // left end of the witness window
    double margin = 0.0;        // min over (a,b) of the windowed infimum
    double arg_a = 0.0;
    double arg_b = 0.0;
};

struct ScanRow {
    double a = 0.0;
    double b = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double margin = 0.0;
};

/// Windowed infimum of p_{a,b,1} over [(a+b)/2+1, (a+b)/2+2] for every grid
/// pair, probed on `probes` points with one 3x refinement pass at the argmin.
std::vector<ScanRow> goodness_scan_table(std::span<const double> a_grid, std::span<const double> b_grid,
                                         int probes = 201);

GoodnessReport goodness_margin_scan(std::span<const double> a_grid, std::span<const double> b_grid);

void write_scan_csv(std::ostream& out, std::span<const ScanRow> rows);

}  // namespace driftnoise::density
