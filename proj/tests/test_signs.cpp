#include <cmath>
#include <vector>

#include "doctest.h"
#include "driftnoise/density.hpp"
#include "driftnoise/errors.hpp"
#include "driftnoise/rng.hpp"
#include "driftnoise/signs.hpp"

using namespace driftnoise;
using namespace driftnoise::signs;

TEST_SUITE_BEGIN("signs");

TEST_CASE("square wave interval convention") {
    CHECK(square_wave(0.25) == 1.0);
    CHECK(square_wave(0.75) == -1.0);
    CHECK(square_wave(0.0) == 1.0);   // left-closed at integers
    CHECK(square_wave(0.5) == -1.0);  // left-closed at half-integers
    for (double x : {-2.3, 0.1, 7.49}) {
        CHECK(square_wave(x + 1.0) == square_wave(x));
    }
}

TEST_CASE("square wave positive set has measure one half") {
    // sigma = +1 exactly on [0, 1/2) within one period: interval arithmetic
    // via the flip points of one period
    SignRule rule;
    rule.kind = RuleKind::square_wave;
    rule.levels.push_back({1.0, 1.0, 0.0, {}, {}});
    auto flips = level_flip_points(rule, 1, 0.0, 1.0);
    REQUIRE(flips.size() == 1);
    CHECK(flips[0] == 0.5);
    CHECK(rule.eval(1, 0.25) == 1.0);
    CHECK(rule.eval(1, 0.75) == -1.0);
    // measure of the +1 part: 0.5 - 0.0 exactly
    CHECK(flips[0] - 0.0 == 0.5);
}

TEST_CASE("closed-form autocorrelation values") {
    CHECK(autocorrelation(0.0) == 1.0);
    CHECK(autocorrelation(0.5) == -1.0);
    CHECK(autocorrelation(0.25) == 0.0);  // frozen from the numeric oracle
    CHECK(autocorrelation_numeric(0.25) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("autocorrelation symmetry and periodicity") {
    for (int k = -20; k <= 20; ++k) {
        double a = static_cast<double>(k) * 0.1;
        CHECK(autocorrelation(a) == doctest::Approx(autocorrelation(-a)).epsilon(1e-12));
        CHECK(autocorrelation(a) == doctest::Approx(autocorrelation(a + 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("closed form matches numeric integration to 1e-9 on 1000 points") {
    for (int k = 0; k < 1000; ++k) {
        double a = 2.0 * static_cast<double>(k) / 999.0;
        CHECK(std::abs(autocorrelation(a) - autocorrelation_numeric(a)) <= 1e-9);
    }
}

TEST_CASE("|R| = 1 exactly iff 2a is an integer on the 0.05 grid") {
    for (int k = 0; k <= 40; ++k) {
        double a = static_cast<double>(k) / 20.0;
        bool unit = std::abs(autocorrelation(a)) == 1.0;
        CHECK(unit == (k % 10 == 0));
    }
}

TEST_CASE("incommensurability witness") {
    // no c != 0 has both |R(c)| = 1 and |R(c sqrt 2)| = 1
    const double root2 = std::sqrt(2.0);
    std::vector<double> cs;
    for (int k = -8; k <= 8; ++k) {
        if (k == 0) continue;
        cs.push_back(static_cast<double>(k) / 2.0);
        cs.push_back(static_cast<double>(k) / (2.0 * root2));
    }
    for (double c : cs) {
        bool both = std::abs(autocorrelation(c)) > 1.0 - 1e-9 && std::abs(autocorrelation(c * root2)) > 1.0 - 1e-9;
        CHECK_FALSE(both);
    }
}

TEST_CASE("drift-sensitive rule frequencies") {
    SignRule rule = build_drift_sensitive_rule(4);
    CHECK(rule.level(1).lambda == doctest::Approx(3.0));            // lambda_1 * 3^-1 = 1
    CHECK(rule.level(2).lambda == doctest::Approx(9.0 * std::sqrt(2.0)));  // lambda_2 * 3^-2 = sqrt 2
    CHECK(rule.level(1).epsilon == doctest::Approx(2.0 / 9.0));
    CHECK(rule.level(3).epsilon == doctest::Approx(2.0 / 81.0));
    // periodicity f_n(x + 1/lambda_n) = f_n(x)
    for (int n = 1; n <= 4; ++n) {
        double period = 1.0 / rule.level(n).lambda;
        for (double x : {-0.37, 0.11, 0.93}) {
            CHECK(rule.eval(n, x + period) == rule.eval(n, x));
        }
    }
}

TEST_CASE("shift rule composes additively and zero offsets change nothing") {
    SignRule rule = build_drift_sensitive_rule(3);
    std::vector<double> zero(3, 0.0);
    SignRule same = shift_rule(rule, zero);
    for (int n = 1; n <= 3; ++n) {
        for (double x : {-1.0, 0.2, 0.31}) CHECK(same.eval(n, x) == rule.eval(n, x));
    }
    std::vector<double> d1{0.1, 0.02, 0.003};
    std::vector<double> d2{0.05, 0.01, 0.002};
    SignRule two_step = shift_rule(shift_rule(rule, d1), d2);
    std::vector<double> dsum{0.15, 0.03, 0.005};
    SignRule one_step = shift_rule(rule, dsum);
    for (int n = 1; n <= 3; ++n) {
        for (double x : {-0.7, 0.0, 0.4, 1.3}) CHECK(two_step.eval(n, x) == one_step.eval(n, x));
    }
}

TEST_CASE("shift rule rejects mismatched offset lists") {
    SignRule rule = build_drift_sensitive_rule(3);
    std::vector<double> wrong{0.1, 0.2};
    CHECK_THROWS_AS(shift_rule(rule, wrong), std::invalid_argument);
}

TEST_CASE("scale offsets reproduce the 3^-n c family") {
    SignRule rule = build_drift_sensitive_rule(3);
    SignRule g = shift_rule(rule, shift_offsets_scale(3, 1.0));
    for (int n = 1; n <= 3; ++n) {
        double offset = std::pow(3.0, -n);
        for (double x : {-0.2, 0.05, 0.6}) {
            CHECK(g.eval(n, x) == rule.eval(n, x + offset));
        }
    }
}

TEST_CASE("mean value: f against itself is one for any density") {
    SignRule rule = build_drift_sensitive_rule(2);
    auto gauss = [](double x) { return std::exp(-x * x) / std::sqrt(M_PI); };
    double err = 0.0;
    double v = mean_value(rule, rule, 1, gauss, -8.0, 8.0, {}, &err);
    CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("mean value over one uniform period reproduces the closed-form R") {
    // f = sigma(3x), shift delta: integral against uniform density on one
    // period equals R(3 delta)
    SignRule f = build_drift_sensitive_rule(1);  // level 1: lambda = 3
    for (double phase : {0.5, 0.25, 0.1, 0.767}) {
        double delta = phase / 3.0;
        SignRule g = shift_rule(f, std::vector<double>{delta});
        auto uniform = [](double x) { return (x >= 0.0 && x < 1.0 / 3.0) ? 3.0 : 0.0; };
        double v = mean_value(f, g, 1, uniform, 0.0, 1.0 / 3.0);
        CHECK(v == doctest::Approx(autocorrelation(phase)).epsilon(1e-9));
    }
}

TEST_CASE("fine-period mean value against the conditional density approaches R") {
    // period <= 1e-3 and lambda*delta = 0.5: the period-averaging limit gives
    // R(0.5) = -1 within 0.01
    density::DensityParams params{1.0, 1.0, 1.0};
    auto dens = [&](double x) { return density::midpoint_density(params, x); };
    SignRule f;
    f.kind = RuleKind::square_wave;
    f.levels.push_back({1.0, 2000.0, 0.0, {}, {}});
    SignRule g = shift_rule(f, std::vector<double>{0.5 / 2000.0});
    double v = mean_value(f, g, 1, dens, 0.0, 1.0 + 12.0 * std::sqrt(0.5), {.abs_tol = 1e-7, .max_depth = 48});
    CHECK(v == doctest::Approx(-1.0).epsilon(0.01));
}

TEST_CASE("mean value magnitude never exceeds one plus the tolerance") {
    SignRule f = build_drift_sensitive_rule(2);
    auto gauss = [](double x) { return std::exp(-(x - 0.3) * (x - 0.3)) / std::sqrt(M_PI); };
    RngStream rng(63, 0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> offsets{0.4 * rng.next_uniform(), 0.1 * rng.next_uniform()};
        SignRule g = shift_rule(f, offsets);
        int n = 1 + (trial % 2);
        double v = mean_value(f, g, n, gauss, -8.0, 8.0, {.abs_tol = 1e-8, .max_depth = 48});
        CHECK(std::abs(v) <= 1.0 + 1e-7);
    }
}

TEST_CASE("quadrature failure surfaces as an error carrying the achieved tolerance") {
    SignRule f = build_drift_sensitive_rule(1);
    // a needle the depth-starved quadrature cannot resolve to 1e-12
    auto needle = [](double x) { return 1.0 / (1e-9 + (x - 0.123456) * (x - 0.123456)); };
    bool threw = false;
    try {
        mean_value(f, f, 1, needle, 0.0, 1.0, {.abs_tol = 1e-12, .max_depth = 3});
    } catch (const QuadratureError& e) {
        threw = true;
        CHECK(e.achieved > 1e-12);
    }
    CHECK(threw);
}

TEST_CASE("custom table rules evaluate right-continuously") {
    SignRule rule;
    rule.kind = RuleKind::custom_table;
    RuleLevel lv;
    lv.epsilon = 1.0;
    lv.table_breaks = {0.0, 1.0};
    lv.table_values = {1, -1, 1};
    rule.levels.push_back(lv);
    CHECK(rule.eval(1, -0.5) == 1.0);
    CHECK(rule.eval(1, 0.0) == -1.0);  // right-continuous at the break
    CHECK(rule.eval(1, 0.5) == -1.0);
    CHECK(rule.eval(1, 1.0) == 1.0);
}

TEST_SUITE_END();
