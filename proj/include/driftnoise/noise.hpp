#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "driftnoise/brownian.hpp"
#include "driftnoise/rng.hpp"
#include "driftnoise/signs.hpp"

namespace driftnoise::noise {

/// Signs attached to enumerated minima, keyed by grid index, ascending.
struct SignField {
    std::vector<std::pair<std::int64_t, signed char>> entries;

    signed char at(std::int64_t index) const;
    bool same_domain(const brownian::MinimaList& minima) const;
    bool operator==(const SignField&) const = default;
};

/// A discretized noise point: a path plus independent fair signs at its
/// enumerated local minima.  rule_tag names the rule family under which
/// compositions of this element are interpreted.
struct NoiseElement {
    brownian::DiscretePath path;
    brownian::MinimaList minima;  // enumeration order
    SignField signs;
    std::string rule_tag;
    std::size_t requested_k = 0;
    bool short_list = false;  // fewer strict minima than requested
};

/// Sample a path on the grid, enumerate up to k minima, attach iid fair signs.
NoiseElement sample_noise(const TimeGrid& grid, const signs::SignRule& rule, std::size_t k, RngStream& rng);

/// Interleaved merge of enumerations on adjacent intervals: tau_{2k-1} from
/// the left list, tau_{2k} from the right list (right indices shifted by
/// s_cells), the longer tail appended.  Throws SeamCollisionError when a time
/// touches the seam.
brownian::MinimaList merge_enumerations(const brownian::MinimaList& left, const brownian::MinimaList& right,
                                        std::int64_t s_cells, std::int64_t t_cells);

/// Twisted composition: paths concatenate; right signs shift in time; each
/// left sign at tau picks up the factor f_n(B(tau+eps_n) - B(tau)) for every
/// level with tau + eps_n in the half-open seam window (s, s+t].
NoiseElement compose(const NoiseElement& left, const NoiseElement& right, const signs::SignRule& rule);

/// Drift the path, keep the signs at the same times.  Refuses elements whose
/// tracked minima stop being strict local minima under the drift.
NoiseElement drift_map(const NoiseElement& element, double lambda);

struct DriftDiagramReport {
    std::int64_t replicas = 0;
    std::int64_t skipped = 0;
    std::int64_t passed = 0;  // sign fields exactly equal among non-skipped
    double max_path_dev = 0.0;
};

/// Compose-then-drift against drift-then-compose with the drift-shifted rule
/// g_n(x) = f_n(x + 2 lambda eps_n); signs must agree exactly, paths to
/// floating accuracy.
DriftDiagramReport check_drift_diagram(std::int64_t s_cells, std::int64_t t_cells, int depth, double lambda,
                                       const signs::SignRule& rule_f, std::int64_t replicas, const RngFamily& rng,
                                       std::size_t k_track = 4);

struct SignProcessPoint {
    int n = 0;
    double time = 0.0;            // tau + 3^-n
    signed char value = 0;        // S(tau + 3^-n)
    double jump_factor = 1.0;     // f_{n-1}(B(tau+2*3^-n) - B(tau)) when recorded
    bool jump_recorded = false;   // jump time inside the element and level present
};

struct SignProcess {
    std::int64_t tau_index = 0;
    std::vector<SignProcessPoint> points;  // ascending n
    bool truncated = false;                // requested range clipped at the right end
};

/// Values of the global-minimum sign process S at times tau + 3^-n obtained by
/// composing restrictions; jump ratios obey the level rule by construction.
/// tau is the element's least tracked minimum (the global one, up to the
/// K-truncation of the tracked set).
SignProcess sign_process_at_global_min(const NoiseElement& element, const signs::SignRule& rule, int n_lo, int n_hi);

/// Binary serialization: text magic + little-endian header, path values as
/// 64-bit floats, minima times as grid indices, signs as a packed bit string.
void save_noise_element(std::ostream& out, const NoiseElement& element);
NoiseElement load_noise_element(std::istream& in);

}  // namespace driftnoise::noise
