#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "driftnoise/density.hpp"
#include "driftnoise/grid.hpp"
#include "driftnoise/rng.hpp"

namespace driftnoise::brownian {

/// Brownian sample path on a triadic grid; values[0] is pinned to 0.
struct DiscretePath {
    TimeGrid grid;
    std::vector<double> values;

    double at(std::int64_t i) const { return values[static_cast<std::size_t>(i)]; }
    double terminal() const { return values.back(); }
};

/// Independent N(0, step) increments from the given stream.
DiscretePath sample_path(const TimeGrid& grid, RngStream& rng);

/// Brownian-bridge interpolation onto a grid extra_depth levels finer.  Values
/// at old grid points are unchanged; each cell's two interior points are drawn
/// jointly from the bridge conditional, one refinement level at a time.
DiscretePath refine_path(const DiscretePath& path, int extra_depth, RngStream& rng);

/// (theta^lambda b)(s) = b(s) - 2 lambda s.
DiscretePath drift_transform(const DiscretePath& path, double lambda);

/// Radon-Nikodym density of the drifted Wiener law: exp(2 lambda B_t - 2 lambda^2 t).
double rn_derivative(const DiscretePath& path, double lambda);

struct GirsanovReport {
    double lhs = 0.0;  // mean of X(theta^lambda B) * D
    double rhs = 0.0;  // mean of X(B)
    double stderr_lhs = 0.0;
    double stderr_rhs = 0.0;
    double stderr_diff = 0.0;  // pooled
    std::int64_t replicas = 0;
};

/// Monte Carlo check of E[X(theta^lambda B) D] = E[X(B)].  Functional values
/// are used as-is (no clipping); a non-finite value aborts the batch.
GirsanovReport girsanov_pushforward_check(const std::function<double(const DiscretePath&)>& functional, double lambda,
                                          std::int64_t replicas, const TimeGrid& grid, const RngFamily& rng);

using PathFunctional = std::function<std::complex<double>(const DiscretePath&)>;

/// (Theta^shift(lambda) X)(b) = exp(lambda b(t) - lambda^2 t) X(theta^lambda b).
std::complex<double> shift_automorphism_apply(const PathFunctional& functional, const DiscretePath& path,
                                              double lambda);

/// (Theta^shift(i mu) X)(b) = exp(i mu b(t)) X(b).
std::complex<double> imaginary_shift_apply(const PathFunctional& functional, const DiscretePath& path, double mu);

struct MinimumEntry {
    std::int64_t index = 0;   // grid index of tau_k
    double value = 0.0;       // path value at tau_k
    double sharpness = 0.0;   // min of the two neighbor gaps
};

struct MinimaList {
    std::vector<MinimumEntry> entries;  // enumeration order
};

/// Earliest interior argmin (endpoints excluded, ties to smallest time).
std::pair<std::int64_t, double> global_min(const DiscretePath& path);

/// Strict interior local minimum at grid index i.
bool is_strict_local_min(const DiscretePath& path, std::int64_t i);

/// Measurable enumeration by recursive interval halving: the minimizer of the
/// whole open interval first, then per level the minimizer of each half /
/// quarter / ... that contains none of the already chosen times, left to
/// right.  Only strict local minima are eligible; returns at most max_count.
MinimaList enumerate_local_minima(const DiscretePath& path, std::size_t max_count);

struct ConditionedBatch {
    std::vector<double> samples;
    std::int64_t proposals = 0;
    double acceptance_rate = 0.0;
};

/// Default refinement: cell length epsilon/81.
inline constexpr int kDefaultFineDepth = 4;

/// One draw of the bridge midpoint increment conditioned to stay positive:
/// bridge from a to b over time 2*epsilon on 2*3^fine_depth cells, exact
/// rejection with the per-cell crossing probability exp(-2 v_i v_{i+1} / h).
double sample_conditioned_min_increment(const density::DensityParams& params, RngStream& rng,
                                        int fine_depth = kDefaultFineDepth);

/// Batch version reporting the proposal acceptance rate.  Throws
/// AcceptanceStarvationError when the rate drops below 1e-4 over a batch.
ConditionedBatch sample_conditioned_batch(const density::DensityParams& params, int fine_depth, std::int64_t count,
                                          RngStream& rng);

}  // namespace driftnoise::brownian
