#include "driftnoise/signs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "driftnoise/errors.hpp"
#include "driftnoise/stats.hpp"

namespace driftnoise::signs {

namespace {

double pow3d(int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= 3.0;
    return r;
}

}  // namespace

double square_wave(double x) {
    double frac = x - std::floor(x);  // in [0,1)
    return frac < 0.5 ? 1.0 : -1.0;
}

double autocorrelation(double a) {
    double u = a - std::floor(a);  // in [0,1)
    return u <= 0.5 ? 1.0 - 4.0 * u : 4.0 * u - 3.0;
}

double autocorrelation_numeric(double a) {
    // sigma(u) flips at u = 1/2; sigma(u+a) flips where u + a is a half-integer
    std::vector<double> pts{0.0, 0.5, 1.0};
    const double m_lo = std::floor(2.0 * a);
    for (double m = m_lo; m <= m_lo + 3.0; m += 1.0) {
        double u = 0.5 * m - a;
        if (u > 0.0 && u < 1.0) pts.push_back(u);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double mid = 0.5 * (pts[i] + pts[i + 1]);
        total += square_wave(mid) * square_wave(mid + a) * (pts[i + 1] - pts[i]);
    }
    return total;
}

const RuleLevel& SignRule::level(int n) const {
    if (n < 1 || n > max_level()) throw std::invalid_argument("SignRule: level out of range");
    return levels[static_cast<std::size_t>(n - 1)];
}

double SignRule::eval(int n, double x) const {
    const RuleLevel& lv = level(n);
    switch (kind) {
        case RuleKind::constant_one:
            return 1.0;
        case RuleKind::square_wave:
        case RuleKind::square_wave_shifted:
            return square_wave(lv.lambda * (x + lv.delta));
        case RuleKind::custom_table: {
            double y = x + lv.delta;
            auto it = std::upper_bound(lv.table_breaks.begin(), lv.table_breaks.end(), y);
            return static_cast<double>(lv.table_values[static_cast<std::size_t>(it - lv.table_breaks.begin())]);
        }
    }
    throw std::logic_error("SignRule: bad kind");
}

SignRule build_drift_sensitive_rule(int n_max) {
    if (n_max < 1) throw std::invalid_argument("build_drift_sensitive_rule: n_max must be >= 1");
    SignRule rule;
    rule.kind = RuleKind::square_wave;
    rule.tag = "drift-sensitive";
    rule.levels.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        RuleLevel lv;
        lv.epsilon = 2.0 / pow3d(n + 1);
        lv.lambda = (n % 2 == 1) ? pow3d(n) : std::sqrt(2.0) * pow3d(n);
        lv.delta = 0.0;
        rule.levels.push_back(lv);
    }
    return rule;
}

SignRule constant_one_rule(int n_max) {
    if (n_max < 1) throw std::invalid_argument("constant_one_rule: n_max must be >= 1");
    SignRule rule;
    rule.kind = RuleKind::constant_one;
    rule.tag = "constant-one";
    rule.levels.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        RuleLevel lv;
        lv.epsilon = 2.0 / pow3d(n + 1);
        rule.levels.push_back(lv);
    }
    return rule;
}

SignRule shift_rule(const SignRule& rule, std::span<const double> offsets) {
    if (offsets.size() != rule.levels.size())
        throw std::invalid_argument("shift_rule: offsets must match the rule's level count");
    SignRule out = rule;
    bool any = false;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        out.levels[i].delta += offsets[i];
        any = any || offsets[i] != 0.0;
    }
    if (any && out.kind == RuleKind::square_wave) out.kind = RuleKind::square_wave_shifted;
    return out;
}

std::vector<double> shift_offsets_scale(int n_max, double c) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) out.push_back(c / pow3d(n));
    return out;
}

std::vector<double> shift_offsets_drift(const SignRule& rule, double lambda) {
    std::vector<double> out;
    out.reserve(rule.levels.size());
    for (const RuleLevel& lv : rule.levels) out.push_back(2.0 * lambda * lv.epsilon);
    return out;
}

std::vector<double> level_flip_points(const SignRule& rule, int n, double lo, double hi) {
    const RuleLevel& lv = rule.level(n);
    std::vector<double> flips;
    switch (rule.kind) {
        case RuleKind::constant_one:
            break;
        case RuleKind::square_wave:
        case RuleKind::square_wave_shifted: {
            // sigma flips where lambda*(x+delta) is a half-integer
            if (lv.lambda <= 0.0) break;
            double k_lo = std::ceil(2.0 * lv.lambda * (lo + lv.delta));
            double k_hi = std::floor(2.0 * lv.lambda * (hi + lv.delta));
            for (double k = k_lo; k <= k_hi; k += 1.0) {
                double x = k / (2.0 * lv.lambda) - lv.delta;
                if (x > lo && x < hi) flips.push_back(x);
            }
            break;
        }
        case RuleKind::custom_table:
            for (double b : lv.table_breaks) {
                double x = b - lv.delta;
                if (x > lo && x < hi) flips.push_back(x);
            }
            break;
    }
    return flips;
}

bool levels_identical(const SignRule& f, const SignRule& g, int n) {
    const RuleLevel& lf = f.level(n);
    const RuleLevel& lg = g.level(n);
    if (f.kind == RuleKind::constant_one && g.kind == RuleKind::constant_one) return true;
    bool f_wave = f.kind == RuleKind::square_wave || f.kind == RuleKind::square_wave_shifted;
    bool g_wave = g.kind == RuleKind::square_wave || g.kind == RuleKind::square_wave_shifted;
    if (f_wave && g_wave) return lf.lambda == lg.lambda && lf.delta == lg.delta;
    if (f.kind == RuleKind::custom_table && g.kind == RuleKind::custom_table)
        return lf.delta == lg.delta && lf.table_breaks == lg.table_breaks && lf.table_values == lg.table_values;
    return false;
}

double mean_value(const SignRule& f, const SignRule& g, int n, const std::function<double(double)>& density, double lo,
                  double hi, const QuadratureSpec& spec, double* err_out) {
    if (hi <= lo) throw std::invalid_argument("mean_value: empty window");
    std::vector<double> flips = level_flip_points(f, n, lo, hi);
    std::vector<double> gf = level_flip_points(g, n, lo, hi);
    flips.insert(flips.end(), gf.begin(), gf.end());
    std::sort(flips.begin(), flips.end());
    flips.erase(std::unique(flips.begin(), flips.end()), flips.end());

    std::vector<double> pts;
    pts.reserve(flips.size() + 2);
    pts.push_back(lo);
    pts.insert(pts.end(), flips.begin(), flips.end());
    pts.push_back(hi);

    QuadratureSpec piece_spec = spec;
    piece_spec.abs_tol = spec.abs_tol / static_cast<double>(pts.size());

    std::vector<double> contributions(pts.size() - 1);
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double mid = 0.5 * (pts[i] + pts[i + 1]);
        double s = f.eval(n, mid) * g.eval(n, mid);
        QuadratureResult q = integrate_adaptive(density, pts[i], pts[i + 1], piece_spec);
        contributions[i] = s * q.value;
        err += q.error;
    }
    if (err_out) *err_out = err;
    return pairwise_sum(contributions);
}

}  // namespace driftnoise::signs
