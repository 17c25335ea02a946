#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "driftnoise/brownian.hpp"
#include "driftnoise/stats.hpp"

using namespace driftnoise;
using namespace driftnoise::brownian;

namespace {

// Independent oracle: collect all strict local minima, then replay the
// halving scheme with direct rational comparisons (times i/cells vs dyadic
// slot boundaries handled through long double arithmetic).
std::vector<std::int64_t> enumeration_oracle(const DiscretePath& path, std::size_t max_count) {
    const std::int64_t cells = path.grid.cells();
    struct Cand {
        std::int64_t index;
        double value;
    };
    std::vector<Cand> all;
    for (std::int64_t i = 1; i < cells; ++i) {
        if (path.at(i - 1) > path.at(i) && path.at(i + 1) > path.at(i)) all.push_back({i, path.at(i)});
    }
    std::vector<std::int64_t> emitted;
    auto contains = [&](long double lo, long double hi, std::int64_t idx) {
        long double t = static_cast<long double>(idx) / static_cast<long double>(cells);
        return lo < t && t < hi;
    };
    for (int level = 0; emitted.size() < std::min(max_count, all.size()); ++level) {
        std::int64_t slots = std::int64_t{1} << level;
        for (std::int64_t slot = 0; slot < slots && emitted.size() < max_count; ++slot) {
            long double lo = static_cast<long double>(slot) / static_cast<long double>(slots);
            long double hi = static_cast<long double>(slot + 1) / static_cast<long double>(slots);
            bool blocked = false;
            for (std::int64_t e : emitted) {
                if (contains(lo, hi, e)) blocked = true;
            }
            if (blocked) continue;
            const Cand* best = nullptr;
            for (const Cand& c : all) {
                if (!contains(lo, hi, c.index)) continue;
                if (!best || c.value < best->value) best = &c;
            }
            if (best) emitted.push_back(best->index);
        }
        if (slots > 2 * cells) break;
    }
    return emitted;
}

}  // namespace

TEST_SUITE_BEGIN("minima");

TEST_CASE("global min reads off the smallest interior value") {
    DiscretePath p{TimeGrid(2, 4), {0.0, -1.0, 0.5, -0.3, 1.0}};
    auto [tau, value] = global_min(p);
    CHECK(tau == 1);
    CHECK(value == -1.0);
}

TEST_CASE("global min tie-break picks the earliest time") {
    DiscretePath p{TimeGrid(2, 4), {0.0, -1.0, 0.5, -1.0, 1.0}};
    CHECK(global_min(p).first == 1);
    DiscretePath flat{TimeGrid(2, 4), {0.0, 0.0, 0.0, 0.0, 0.0}};
    CHECK(global_min(flat).first == 1);
}

TEST_CASE("enumeration of the read-off example") {
    DiscretePath p{TimeGrid(2, 4), {0.0, -1.0, 0.5, -0.3, 1.0}};
    MinimaList list = enumerate_local_minima(p, 8);
    REQUIRE(list.entries.size() == 2);
    CHECK(list.entries[0].index == 1);  // global minimizer
    CHECK(list.entries[1].index == 3);  // minimizer of the right half
    CHECK(list.entries[0].value == -1.0);
    CHECK(list.entries[1].sharpness == doctest::Approx(std::min(0.5 - (-0.3), 1.0 - (-0.3))));
}

TEST_CASE("enumerated times are pairwise distinct strict minima") {
    const RngFamily family{41};
    for (std::uint64_t r = 0; r < 50; ++r) {
        RngStream s = family.stream(r);
        DiscretePath p = sample_path(TimeGrid::unit(5), s);
        MinimaList list = enumerate_local_minima(p, 12);
        std::vector<std::int64_t> idx;
        for (const auto& e : list.entries) {
            CHECK(is_strict_local_min(p, e.index));
            idx.push_back(e.index);
        }
        std::sort(idx.begin(), idx.end());
        CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
        // entry 1 is the least-value strict minimum
        if (!list.entries.empty()) {
            double least = list.entries[0].value;
            for (const auto& e : list.entries) CHECK(e.value >= least);
        }
    }
}

TEST_CASE("enumeration equals the brute-force replay oracle on 100 random paths") {
    const RngFamily family{42};
    for (std::uint64_t r = 0; r < 100; ++r) {
        RngStream s = family.stream(r);
        DiscretePath p = sample_path(TimeGrid::unit(4), s);
        MinimaList list = enumerate_local_minima(p, 1000);
        std::vector<std::int64_t> oracle = enumeration_oracle(p, 1000);
        REQUIRE(list.entries.size() == oracle.size());
        for (std::size_t k = 0; k < oracle.size(); ++k) CHECK(list.entries[k].index == oracle[k]);
    }
}

TEST_CASE("argmin distribution follows the arcsine law at depth 9") {
    const std::size_t n = 100000;
    const RngFamily family{43};
    const TimeGrid grid = TimeGrid::unit(9);
    std::vector<double> taus(n);
    for (std::size_t r = 0; r < n; ++r) {
        RngStream s = family.stream(r);
        DiscretePath p = sample_path(grid, s);
        taus[r] = grid.time_at(global_min(p).first);
    }
    std::sort(taus.begin(), taus.end());
    std::vector<double> cdf(n);
    for (std::size_t i = 0; i < n; ++i) cdf[i] = arcsine_cdf(taus[i]);
    CHECK(ks_statistic(cdf) <= 0.02);
}

TEST_CASE("minima with sharpness above the drift scale survive the drift") {
    const RngFamily family{44};
    auto check_at = [&](int depth, std::uint64_t replicas) {
        for (std::uint64_t r = 0; r < replicas; ++r) {
            RngStream s = family.stream(1000 * static_cast<std::uint64_t>(depth) + r);
            DiscretePath p = sample_path(TimeGrid::unit(depth), s);
            MinimaList list = enumerate_local_minima(p, 10);
            for (double lambda : {-1.0, 0.4, 1.0}) {
                DiscretePath d = drift_transform(p, lambda);
                const double threshold = 2.0 * std::abs(lambda) * p.grid.step();
                for (const auto& e : list.entries) {
                    if (e.sharpness > threshold) CHECK(is_strict_local_min(d, e.index));
                }
            }
        }
    };
    check_at(7, 30);
    check_at(12, 3);
}

TEST_CASE("global min commutes with drift when sharpness dominates") {
    const RngFamily family{45};
    const int depth = 7;
    for (std::uint64_t r = 0; r < 50; ++r) {
        RngStream s = family.stream(r);
        DiscretePath p = sample_path(TimeGrid::unit(depth), s);
        auto [tau, value] = global_min(p);
        const double lambda = 0.2;
        // a minimum whose sharpness beats the drift tilt stays put; for the
        // global argmin we additionally need a wide margin over other values
        DiscretePath d = drift_transform(p, lambda);
        auto [tau_d, value_d] = global_min(d);
        double margin = std::numeric_limits<double>::infinity();
        for (std::int64_t i = 1; i < p.grid.cells(); ++i) {
            if (i != tau) margin = std::min(margin, p.at(i) - value);
        }
        if (margin > 2.0 * std::abs(lambda) * 1.0) {  // tilt over the whole interval
            CHECK(tau_d == tau);
        }
    }
}

TEST_SUITE_END();
