#pragma once

#include <functional>

namespace driftnoise {

struct QuadratureSpec {
    double abs_tol = 1e-9;
    int max_depth = 48;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // accumulated error estimate
};

/// Adaptive Simpson integration of a smooth integrand on [a,b].
/// Throws QuadratureError when the recursion depth limit is hit before the
/// tolerance is met.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureSpec& spec = {});

}  // namespace driftnoise
