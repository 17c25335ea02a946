#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "driftnoise/brownian.hpp"
#include "driftnoise/density.hpp"
#include "driftnoise/stats.hpp"

using namespace driftnoise;
using namespace driftnoise::density;

TEST_SUITE_BEGIN("density");

TEST_CASE("support and non-negativity") {
    DensityParams p{1.0, 2.0, 0.5};
    CHECK(midpoint_density(p, 0.0) == 0.0);
    CHECK(midpoint_density(p, -1.0) == 0.0);
    for (double x : {1e-8, 0.1, 1.0, 3.0, 10.0}) {
        CHECK(midpoint_density(p, x) >= 0.0);
    }
    // vanishing at both ends of the support
    CHECK(midpoint_density(p, 1e-8) < 1e-6);
    double far = 0.5 * (p.a + p.b) + 10.0 * std::sqrt(p.epsilon);
    CHECK(midpoint_density(p, far) < 1e-6);
}

TEST_CASE("symmetry in a and b") {
    for (auto [a, b, x] : std::vector<std::tuple<double, double, double>>{{1.0, 2.0, 1.3}, {0.2, 5.0, 2.0}}) {
        DensityParams pab{a, b, 1.0};
        DensityParams pba{b, a, 1.0};
        CHECK(midpoint_density(pab, x) == midpoint_density(pba, x));
    }
}

TEST_CASE("scaling identity") {
    // p_{a,b,eps}(x) = eps^{-1/2} p_{a/sqrt(eps), b/sqrt(eps), 1}(x/sqrt(eps))
    auto check_one = [](double a, double b, double eps, double x) {
        const double sq = std::sqrt(eps);
        DensityParams lhs{a, b, eps};
        DensityParams rhs{a / sq, b / sq, 1.0};
        CHECK(midpoint_density(lhs, x) ==
              doctest::Approx(midpoint_density(rhs, x / sq) / sq).epsilon(1e-12));
    };
    check_one(1.0, 1.0, 1.0 / 9.0, 0.5);
    RngStream rng(77, 0);
    for (int i = 0; i < 50; ++i) {
        double a = 0.1 + 3.0 * rng.next_uniform();
        double b = 0.1 + 3.0 * rng.next_uniform();
        double eps = 0.05 + rng.next_uniform();
        double x = 4.0 * rng.next_uniform();
        check_one(a, b, eps, x);
    }
}

TEST_CASE("saturation clamps instead of NaN") {
    DensityParams p{1.0, 1.0, 1e-8};
    DensityValue v = midpoint_density_checked(p, 1000.0);
    CHECK(v.value == 0.0);
    CHECK(v.saturated);
    CHECK(std::isfinite(midpoint_density(p, 1e300)));
}

TEST_CASE("normalization at the reference parameter sets") {
    CHECK(normalize_check({1.0, 1.0, 1.0}, 1e-6) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(normalize_check({0.01, 100.0, 1.0}, 1e-6) == doctest::Approx(1.0).epsilon(1e-6));
    double ninth = normalize_check({1.0, 1.0, 1.0 / 9.0}, 1e-6);
    CHECK(ninth == doctest::Approx(1.0).epsilon(1e-6));
    // scaling identity maps the eps = 1/9 integral onto the eps = 1 one
    double unit = normalize_check({3.0, 3.0, 1.0}, 1e-6);
    CHECK(std::abs(ninth - unit) < 1e-6);
}

TEST_CASE("monte carlo agreement with the conditioned sampler") {
    struct Case {
        double a, b, eps;
    };
    for (const Case c : {Case{1.0, 1.0, 1.0}, Case{0.5, 2.0, 1.0}, Case{1.0, 1.0, 1.0 / 9.0}}) {
        DensityParams params{c.a, c.b, c.eps};
        RngStream rng(91, 0);
        auto batch = brownian::sample_conditioned_batch(params, 4, 20000, rng);
        std::sort(batch.samples.begin(), batch.samples.end());
        std::vector<double> cdf = density_cdf_at(params, batch.samples, 1e-6);
        CHECK(ks_statistic(cdf) <= 0.02);
    }
}

TEST_CASE("epsilon-goodness on simple densities") {
    auto flat = [](double x) { return (x > 0.0 && x < 1.0) ? 1.0 : 0.0; };
    CHECK(epsilon_goodness(flat, 0.5, 0.0 + 1e-9, 1.0 - 1e-9, 64));
    auto spike = [](double x) { return (x >= 0.0 && x <= 0.01) ? 100.0 : 0.0; };
    CHECK_FALSE(epsilon_goodness(spike, 0.5, -1.0, 2.0, 64));
}

TEST_CASE("margin scan: positive margin, symmetry, agreement with direct evaluation") {
    std::vector<double> grid;
    for (int k = -3; k <= 3; ++k) grid.push_back(std::pow(10.0, k));
    GoodnessReport report = goodness_margin_scan(grid, grid);
    CHECK(report.margin > 0.0);
    CHECK(report.epsilon_star > 0.0);
    CHECK(report.epsilon_star <= 1.0);
    CHECK(report.margin >= report.epsilon_star);

    // symmetry under swapping the grids
    std::vector<double> coarse{0.5, 1.0, 2.0};
    std::vector<double> fine{0.1, 1.0, 10.0};
    CHECK(goodness_margin_scan(coarse, fine).margin == doctest::Approx(goodness_margin_scan(fine, coarse).margin));

    // a = b = 1: the windowed infimum sits at a window endpoint (unimodal tail)
    DensityParams p{1.0, 1.0, 1.0};
    auto table = goodness_scan_table(std::vector<double>{1.0}, std::vector<double>{1.0});
    REQUIRE(table.size() == 1);
    double endpoint_min = std::min(midpoint_density(p, 2.0), midpoint_density(p, 3.0));
    CHECK(table[0].margin == doctest::Approx(endpoint_min).epsilon(1e-9));
}

TEST_CASE("the lemma density is epsilon_star-good in its scan window") {
    std::vector<double> grid{1.0};
    GoodnessReport report = goodness_margin_scan(grid, grid);
    DensityParams p{1.0, 1.0, 1.0};
    auto dens = [&](double x) { return midpoint_density(p, x); };
    CHECK(epsilon_goodness(dens, report.epsilon_star, 2.0, 3.0, 128));
}

TEST_CASE("scan csv has the documented five columns") {
    auto rows = goodness_scan_table(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0});
    std::ostringstream out;
    write_scan_csv(out, rows);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "a,b,window_lo,window_hi,margin");
    std::string row;
    int count = 0;
    while (std::getline(in, row)) {
        CHECK(std::count(row.begin(), row.end(), ',') == 4);
        ++count;
    }
    CHECK(count == 2);
}

TEST_SUITE_END();
