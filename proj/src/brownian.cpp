#include "driftnoise/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "driftnoise/errors.hpp"
#include "driftnoise/stats.hpp"

namespace driftnoise::brownian {

DiscretePath sample_path(const TimeGrid& grid, RngStream& rng) {
    DiscretePath path{grid, std::vector<double>(static_cast<std::size_t>(grid.points()))};
    const double sd = std::sqrt(grid.step());
    path.values[0] = 0.0;
    for (std::size_t i = 1; i < path.values.size(); ++i) {
        path.values[i] = path.values[i - 1] + sd * rng.next_gaussian();
    }
    return path;
}

DiscretePath refine_path(const DiscretePath& path, int extra_depth, RngStream& rng) {
    if (extra_depth < 1) throw std::invalid_argument("refine_path: extra_depth must be >= 1");
    DiscretePath cur = path;
    for (int level = 0; level < extra_depth; ++level) {
        const TimeGrid fine(cur.grid.depth() + 1, cur.grid.cells() * 3);
        const double h = cur.grid.step();
        // bridge conditional for the two interior points of one cell
        const double sd1 = std::sqrt(2.0 * h / 9.0);
        const double c21 = std::sqrt(h / 18.0);
        const double sd2 = std::sqrt(h / 6.0);
        std::vector<double> values(static_cast<std::size_t>(fine.points()));
        for (std::int64_t cell = 0; cell < cur.grid.cells(); ++cell) {
            const double left = cur.at(cell);
            const double right = cur.at(cell + 1);
            const double m1 = left + (right - left) / 3.0;
            const double m2 = left + 2.0 * (right - left) / 3.0;
            const double z1 = rng.next_gaussian();
            const double z2 = rng.next_gaussian();
            values[static_cast<std::size_t>(3 * cell)] = left;
            values[static_cast<std::size_t>(3 * cell + 1)] = m1 + sd1 * z1;
            values[static_cast<std::size_t>(3 * cell + 2)] = m2 + c21 * z1 + sd2 * z2;
        }
        values.back() = cur.values.back();
        cur = DiscretePath{fine, std::move(values)};
    }
    return cur;
}

DiscretePath drift_transform(const DiscretePath& path, double lambda) {
    DiscretePath out = path;
    if (lambda == 0.0) return out;
    const double step = path.grid.step();
    for (std::size_t i = 1; i < out.values.size(); ++i) {
        out.values[i] -= 2.0 * lambda * (static_cast<double>(i) * step);
    }
    return out;
}

double rn_derivative(const DiscretePath& path, double lambda) {
    const double t = path.grid.t_end();
    return std::exp(2.0 * lambda * path.terminal() - 2.0 * lambda * lambda * t);
}

GirsanovReport girsanov_pushforward_check(const std::function<double(const DiscretePath&)>& functional, double lambda,
                                          std::int64_t replicas, const TimeGrid& grid, const RngFamily& rng) {
    if (replicas < 1) throw std::invalid_argument("girsanov_pushforward_check: replicas must be >= 1");
    std::vector<double> lhs(static_cast<std::size_t>(replicas));
    std::vector<double> rhs(static_cast<std::size_t>(replicas));
    std::vector<double> diff(static_cast<std::size_t>(replicas));
    for (std::int64_t r = 0; r < replicas; ++r) {
        RngStream stream = rng.stream(static_cast<std::uint64_t>(r));
        DiscretePath path = sample_path(grid, stream);
        const double d = rn_derivative(path, lambda);
        const double x_drift = functional(drift_transform(path, lambda));
        const double x_plain = functional(path);
        if (!std::isfinite(x_drift) || !std::isfinite(x_plain)) {
            throw NumericalError("girsanov_pushforward_check: non-finite functional value at replica " +
                                 std::to_string(r));
        }
        lhs[static_cast<std::size_t>(r)] = x_drift * d;
        rhs[static_cast<std::size_t>(r)] = x_plain;
        diff[static_cast<std::size_t>(r)] = x_drift * d - x_plain;
    }
    GirsanovReport rep;
    MeanStderr ml = mean_stderr(lhs);
    MeanStderr mr = mean_stderr(rhs);
    MeanStderr md = mean_stderr(diff);
    rep.lhs = ml.mean;
    rep.rhs = mr.mean;
    rep.stderr_lhs = ml.stderr_mean;
    rep.stderr_rhs = mr.stderr_mean;
    rep.stderr_diff = md.stderr_mean;
    rep.replicas = replicas;
    return rep;
}

std::complex<double> shift_automorphism_apply(const PathFunctional& functional, const DiscretePath& path,
                                              double lambda) {
    const double t = path.grid.t_end();
    const double factor = std::exp(lambda * path.terminal() - lambda * lambda * t);
    return factor * functional(drift_transform(path, lambda));
}

std::complex<double> imaginary_shift_apply(const PathFunctional& functional, const DiscretePath& path, double mu) {
    const std::complex<double> phase = std::exp(std::complex<double>(0.0, mu * path.terminal()));
    return phase * functional(path);
}

std::pair<std::int64_t, double> global_min(const DiscretePath& path) {
    const std::int64_t n = path.grid.cells();
    if (n < 2) throw std::invalid_argument("global_min: grid has no interior points");
    std::int64_t best = 1;
    double best_value = path.at(1);
    for (std::int64_t i = 2; i < n; ++i) {
        if (path.at(i) < best_value) {
            best = i;
            best_value = path.at(i);
        }
    }
    return {best, best_value};
}

bool is_strict_local_min(const DiscretePath& path, std::int64_t i) {
    if (i < 1 || i >= path.grid.cells()) return false;
    return path.at(i - 1) > path.at(i) && path.at(i + 1) > path.at(i);
}

namespace {

struct Candidate {
    std::int64_t index;
    double value;
};

// Grid indices inside the open dyadic interval (slot*T/2^level, (slot+1)*T/2^level)
// are exactly those in [i_min, i_max]; exact 128-bit integer arithmetic.
struct IndexRange {
    std::int64_t lo, hi;  // inclusive; empty when lo > hi
};

IndexRange dyadic_index_range(std::int64_t cells, int level, std::int64_t slot) {
    __int128 num_lo = static_cast<__int128>(slot) * cells;
    __int128 num_hi = static_cast<__int128>(slot + 1) * cells;
    __int128 den = static_cast<__int128>(1) << level;
    std::int64_t lo = static_cast<std::int64_t>(num_lo / den) + 1;
    std::int64_t hi = static_cast<std::int64_t>((num_hi + den - 1) / den) - 1;
    return {lo, hi};
}

}  // namespace

MinimaList enumerate_local_minima(const DiscretePath& path, std::size_t max_count) {
    if (max_count < 1) throw std::invalid_argument("enumerate_local_minima: max_count must be >= 1");
    const std::int64_t cells = path.grid.cells();
    std::vector<Candidate> candidates;
    for (std::int64_t i = 1; i < cells; ++i) {
        if (is_strict_local_min(path, i)) candidates.push_back({i, path.at(i)});
    }
    MinimaList out;
    if (candidates.empty()) return out;

    std::vector<std::int64_t> taken;  // sorted emitted indices
    auto emit = [&](const Candidate& c) {
        MinimumEntry e;
        e.index = c.index;
        e.value = c.value;
        e.sharpness = std::min(path.at(c.index - 1) - c.value, path.at(c.index + 1) - c.value);
        out.entries.push_back(e);
        taken.insert(std::lower_bound(taken.begin(), taken.end(), c.index), c.index);
    };
    auto candidate_at_or_after = [&](std::int64_t idx) {
        return std::lower_bound(candidates.begin(), candidates.end(), idx,
                                [](const Candidate& c, std::int64_t v) { return c.index < v; });
    };

    for (int level = 0; out.entries.size() < max_count && out.entries.size() < candidates.size(); ++level) {
        const std::int64_t slots = std::int64_t{1} << level;
        for (std::int64_t slot = 0; slot < slots && out.entries.size() < max_count; ++slot) {
            IndexRange range = dyadic_index_range(cells, level, slot);
            if (range.lo > range.hi) continue;
            auto taken_it = std::lower_bound(taken.begin(), taken.end(), range.lo);
            if (taken_it != taken.end() && *taken_it <= range.hi) continue;  // already holds a chosen time
            const Candidate* best = nullptr;
            for (auto it = candidate_at_or_after(range.lo); it != candidates.end() && it->index <= range.hi; ++it) {
                if (!best || it->value < best->value) best = &*it;
            }
            if (best) emit(*best);
        }
        // once every interval holds at most one grid point nothing new can appear
        if (slots > 2 * cells) break;
    }
    return out;
}

double sample_conditioned_min_increment(const density::DensityParams& params, RngStream& rng, int fine_depth) {
    ConditionedBatch batch = sample_conditioned_batch(params, fine_depth, 1, rng);
    return batch.samples.front();
}

ConditionedBatch sample_conditioned_batch(const density::DensityParams& params, int fine_depth, std::int64_t count,
                                          RngStream& rng) {
    params.validate();
    if (fine_depth < 1) throw std::invalid_argument("sample_conditioned_batch: fine_depth must be >= 1");
    if (count < 1) throw std::invalid_argument("sample_conditioned_batch: count must be >= 1");
    const std::int64_t cells = 2 * TimeGrid::pow3(fine_depth);  // even count so the midpoint is a grid point
    const double h = 2.0 * params.epsilon / static_cast<double>(cells);
    const std::int64_t mid = cells / 2;

    ConditionedBatch batch;
    batch.samples.reserve(static_cast<std::size_t>(count));
    std::vector<double> v(static_cast<std::size_t>(cells) + 1);
    v.front() = params.a;
    v.back() = params.b;

    constexpr std::int64_t kStarvationBatch = 20000;
    while (static_cast<std::int64_t>(batch.samples.size()) < count) {
        ++batch.proposals;
        if (batch.proposals % kStarvationBatch == 0) {
            double rate = static_cast<double>(batch.samples.size()) / static_cast<double>(batch.proposals);
            if (rate < 1e-4) {
                throw AcceptanceStarvationError("sample_conditioned_batch: acceptance rate below 1e-4", rate);
            }
        }
        bool rejected = false;
        // sequential bridge construction with early positivity rejection
        for (std::int64_t i = 1; i < cells; ++i) {
            const double remaining = static_cast<double>(cells - i + 1);
            const double prev = v[static_cast<std::size_t>(i - 1)];
            const double mean = prev + (params.b - prev) / remaining;
            const double var = h * (remaining - 1.0) / remaining;
            const double x = mean + std::sqrt(var) * rng.next_gaussian();
            if (x <= 0.0) {
                rejected = true;
                break;
            }
            v[static_cast<std::size_t>(i)] = x;
        }
        if (rejected) continue;
        // exact between-point crossing corrections
        for (std::int64_t i = 0; i < cells && !rejected; ++i) {
            const double q = std::exp(-2.0 * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i + 1)] / h);
            if (rng.next_uniform() < q) rejected = true;
        }
        if (rejected) continue;
        batch.samples.push_back(v[static_cast<std::size_t>(mid)]);
    }
    batch.acceptance_rate = static_cast<double>(batch.samples.size()) / static_cast<double>(batch.proposals);
    return batch;
}

}  // namespace driftnoise::brownian
