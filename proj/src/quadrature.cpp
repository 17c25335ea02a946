#include "driftnoise/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "driftnoise/errors.hpp"

namespace driftnoise {

namespace {

struct AdaptState {
    const std::function<double(double)>& f;
    double err_acc = 0.0;
    double worst_unresolved = 0.0;
};

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(AdaptState& st, double a, double fa, double b, double fb, double m, double fm, double whole, double tol,
             int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = st.f(lm), frm = st.f(rm);
    double left = simpson(a, fa, m, fm, flm);
    double right = simpson(m, fm, b, fb, frm);
    double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || depth <= 0) {
        if (std::abs(delta) > 15.0 * tol) st.worst_unresolved = std::max(st.worst_unresolved, std::abs(delta) / 15.0);
        st.err_acc += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return adapt(st, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adapt(st, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureSpec& spec) {
    QuadratureResult r;
    if (a == b) return r;
    AdaptState st{f};
    double fa = f(a), fb = f(b);
    double m = 0.5 * (a + b), fm = f(m);
    double whole = simpson(a, fa, b, fb, fm);
    r.value = adapt(st, a, fa, b, fb, m, fm, whole, spec.abs_tol, spec.max_depth);
    r.error = st.err_acc;
    if (st.worst_unresolved > spec.abs_tol) {
        throw QuadratureError("integrate_adaptive: depth limit hit before tolerance", st.worst_unresolved);
    }
    return r;
}

}  // namespace driftnoise
