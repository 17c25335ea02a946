#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "driftnoise/quadrature.hpp"

namespace driftnoise::signs {

/// Unit-period square wave: +1 on [k, k+0.5), -1 on [k-0.5, k), k integer.
double square_wave(double x);

/// Closed-form autocorrelation R(a) = int_0^1 sigma(u) sigma(u+a) du.
/// Piecewise linear with period 1: 1-4a on [0,1/2], 4a-3 on [1/2,1].
double autocorrelation(double a);

/// Same integral computed numerically: the integrand is piecewise constant
/// between the flip points of the two factors, so the sum of signed piece
/// lengths is exact to rounding.  Kept as the independent route against the
/// closed form.
double autocorrelation_numeric(double a);

enum class RuleKind { constant_one, square_wave, square_wave_shifted, custom_table };

/// One level of a sign rule: f_n(x) evaluated as the base wave at
/// lambda * (x + delta), or a right-continuous +/-1 step table.
struct RuleLevel {
    double epsilon = 0.0;  // level time scale epsilon_n
    double lambda = 0.0;   // oscillation frequency
    double delta = 0.0;    // shift: f_n(x + delta)
    std::vector<double> table_breaks;       // custom_table only, ascending
    std::vector<signed char> table_values;  // size breaks+1, values on [b_i, b_{i+1})
};

struct SignRule {
    RuleKind kind = RuleKind::constant_one;
    std::vector<RuleLevel> levels;  // level n is levels[n-1]
    std::string tag;

    int max_level() const { return static_cast<int>(levels.size()); }
    const RuleLevel& level(int n) const;
    /// f_n(x) in {-1,+1}.
    double eval(int n, double x) const;
};

/// epsilon_n = 2*3^(-n-1), lambda_n * 3^(-n) = 1 (n odd) or sqrt(2) (n even),
/// delta_n = 0.
SignRule build_drift_sensitive_rule(int n_max);

SignRule constant_one_rule(int n_max);

/// g_n(x) = f_n(x + offsets[n-1]); shifts compose additively.
SignRule shift_rule(const SignRule& rule, std::span<const double> offsets);

/// Offsets delta_n = c * 3^(-n) for levels 1..n_max.
std::vector<double> shift_offsets_scale(int n_max, double c);

/// Offsets delta_n = 2 * lambda * epsilon_n matching the rule's level scales.
std::vector<double> shift_offsets_drift(const SignRule& rule, double lambda);

/// Points in (lo,hi) where f_n changes value, ascending.
std::vector<double> level_flip_points(const SignRule& rule, int n, double lo, double hi);

/// True when f_n and g_n are the same function by construction, so the
/// product f_n * g_n is identically one.
bool levels_identical(const SignRule& f, const SignRule& g, int n);

/// int f_n(x) g_n(x) density(x) dx over [lo,hi], handling the sign flips of
/// both factors exactly and integrating the density adaptively in between.
/// Returns the estimate; *err_out (optional) receives the error bound.
double mean_value(const SignRule& f, const SignRule& g, int n, const std::function<double(double)>& density, double lo,
                  double hi, const QuadratureSpec& spec = {}, double* err_out = nullptr);

}  // namespace driftnoise::signs
