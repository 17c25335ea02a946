#include "driftnoise/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "driftnoise/errors.hpp"

namespace driftnoise::noise {

signed char SignField::at(std::int64_t index) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), index,
                               [](const auto& e, std::int64_t v) { return e.first < v; });
    if (it == entries.end() || it->first != index) throw std::out_of_range("SignField: no sign at index");
    return it->second;
}

bool SignField::same_domain(const brownian::MinimaList& minima) const {
    if (entries.size() != minima.entries.size()) return false;
    std::vector<std::int64_t> idx;
    idx.reserve(minima.entries.size());
    for (const auto& e : minima.entries) idx.push_back(e.index);
    std::sort(idx.begin(), idx.end());
    for (std::size_t i = 0; i < idx.size(); ++i)
        if (entries[i].first != idx[i]) return false;
    return true;
}

NoiseElement sample_noise(const TimeGrid& grid, const signs::SignRule& rule, std::size_t k, RngStream& rng) {
    if (k < 1) throw std::invalid_argument("sample_noise: k must be >= 1");
    NoiseElement element;
    element.path = brownian::sample_path(grid, rng);
    element.minima = brownian::enumerate_local_minima(element.path, k);
    element.rule_tag = rule.tag;
    element.requested_k = k;
    element.short_list = element.minima.entries.size() < k;
    // signs drawn in enumeration order, then stored sorted by grid index
    std::vector<std::pair<std::int64_t, signed char>> drawn;
    drawn.reserve(element.minima.entries.size());
    for (const auto& entry : element.minima.entries) {
        signed char s = rng.next_uniform() < 0.5 ? static_cast<signed char>(1) : static_cast<signed char>(-1);
        drawn.emplace_back(entry.index, s);
    }
    std::sort(drawn.begin(), drawn.end());
    element.signs.entries = std::move(drawn);
    return element;
}

brownian::MinimaList merge_enumerations(const brownian::MinimaList& left, const brownian::MinimaList& right,
                                        std::int64_t s_cells, std::int64_t t_cells) {
    for (const auto& e : left.entries) {
        if (e.index <= 0 || e.index >= s_cells)
            throw SeamCollisionError("merge_enumerations: left minimum touches the seam or boundary");
    }
    for (const auto& e : right.entries) {
        if (e.index <= 0 || e.index >= t_cells)
            throw SeamCollisionError("merge_enumerations: right minimum touches the seam or boundary");
    }
    brownian::MinimaList merged;
    merged.entries.reserve(left.entries.size() + right.entries.size());
    const std::size_t common = std::min(left.entries.size(), right.entries.size());
    for (std::size_t i = 0; i < common; ++i) {
        merged.entries.push_back(left.entries[i]);
        brownian::MinimumEntry shifted = right.entries[i];
        shifted.index += s_cells;
        merged.entries.push_back(shifted);
    }
    for (std::size_t i = common; i < left.entries.size(); ++i) merged.entries.push_back(left.entries[i]);
    for (std::size_t i = common; i < right.entries.size(); ++i) {
        brownian::MinimumEntry shifted = right.entries[i];
        shifted.index += s_cells;
        merged.entries.push_back(shifted);
    }
    return merged;
}

NoiseElement compose(const NoiseElement& left, const NoiseElement& right, const signs::SignRule& rule) {
    const TimeGrid& gl = left.path.grid;
    const TimeGrid& gr = right.path.grid;
    if (gl.depth() != gr.depth()) throw GridMisalignmentError("compose: grid steps differ");
    if (left.rule_tag != rule.tag || right.rule_tag != rule.tag)
        throw std::invalid_argument("compose: rule_tag mismatch");
    if (!left.signs.same_domain(left.minima) || !right.signs.same_domain(right.minima))
        throw std::invalid_argument("compose: sign field does not match the minima list");
    for (int n = 1; n <= rule.max_level(); ++n) {
        if (!gl.level_aligned(n)) throw GridMisalignmentError("compose: rule level scale below grid resolution");
    }
    const std::int64_t s_cells = gl.cells();
    const std::int64_t t_cells = gr.cells();
    if (s_cells + t_cells > TimeGrid::pow3(gl.depth()))
        throw std::invalid_argument("compose: composed interval exceeds [0,1]");

    NoiseElement out;
    out.path.grid = TimeGrid(gl.depth(), s_cells + t_cells);
    out.path.values.resize(static_cast<std::size_t>(s_cells + t_cells + 1));
    const double b_s = left.path.terminal();
    for (std::int64_t i = 0; i <= s_cells; ++i) out.path.values[static_cast<std::size_t>(i)] = left.path.at(i);
    for (std::int64_t j = 1; j <= t_cells; ++j)
        out.path.values[static_cast<std::size_t>(s_cells + j)] = b_s + right.path.at(j);

    // translate right minima values into the composed frame
    brownian::MinimaList right_translated = right.minima;
    for (auto& e : right_translated.entries) e.value += b_s;
    out.minima = merge_enumerations(left.minima, right_translated, s_cells, t_cells);

    out.signs.entries.reserve(left.signs.entries.size() + right.signs.entries.size());
    for (const auto& [tau, s] : left.signs.entries) {
        signed char sign = s;
        for (int n = 1; n <= rule.max_level(); ++n) {
            const std::int64_t te = tau + 2 * gl.steps_in_pow3(n + 1);  // tau + eps_n
            if (te > s_cells && te <= s_cells + t_cells) {
                const double increment = out.path.at(te) - out.path.at(tau);
                if (rule.eval(n, increment) < 0.0) sign = static_cast<signed char>(-sign);
            }
        }
        out.signs.entries.emplace_back(tau, sign);
    }
    for (const auto& [tau, s] : right.signs.entries) out.signs.entries.emplace_back(tau + s_cells, s);
    std::sort(out.signs.entries.begin(), out.signs.entries.end());

    out.rule_tag = rule.tag;
    out.requested_k = left.requested_k + right.requested_k;
    out.short_list = left.short_list || right.short_list;
    return out;
}

NoiseElement drift_map(const NoiseElement& element, double lambda) {
    NoiseElement out;
    out.path = brownian::drift_transform(element.path, lambda);
    std::vector<std::int64_t> broken;
    for (const auto& [tau, s] : element.signs.entries) {
        if (!brownian::is_strict_local_min(out.path, tau)) broken.push_back(tau);
    }
    if (!broken.empty()) {
        throw DriftDegeneracyError("drift_map: drift destroyed strict minima at listed grid indices; refine the grid",
                                   std::move(broken));
    }
    out.minima = element.minima;
    for (auto& e : out.minima.entries) {
        e.value = out.path.at(e.index);
        e.sharpness = std::min(out.path.at(e.index - 1) - e.value, out.path.at(e.index + 1) - e.value);
    }
    out.signs = element.signs;
    out.rule_tag = element.rule_tag;
    out.requested_k = element.requested_k;
    out.short_list = element.short_list;
    return out;
}

namespace {

double max_relative_dev(const std::vector<double>& a, const std::vector<double>& b) {
    double scale = 1.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    double dev = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dev = std::max(dev, std::abs(a[i] - b[i]));
    return dev / scale;
}

}  // namespace

DriftDiagramReport check_drift_diagram(std::int64_t s_cells, std::int64_t t_cells, int depth, double lambda,
                                       const signs::SignRule& rule_f, std::int64_t replicas, const RngFamily& rng,
                                       std::size_t k_track) {
    const TimeGrid grid_s(depth, s_cells);
    const TimeGrid grid_t(depth, t_cells);
    const signs::SignRule rule_g = signs::shift_rule(rule_f, signs::shift_offsets_drift(rule_f, lambda));
    DriftDiagramReport report;
    report.replicas = replicas;
    for (std::int64_t r = 0; r < replicas; ++r) {
        RngStream stream = rng.stream(static_cast<std::uint64_t>(r));
        NoiseElement left = sample_noise(grid_s, rule_f, k_track, stream);
        NoiseElement right = sample_noise(grid_t, rule_f, k_track, stream);
        NoiseElement composed_then_drifted, drifted_then_composed;
        try {
            composed_then_drifted = drift_map(compose(left, right, rule_f), lambda);
            NoiseElement dl = drift_map(left, lambda);
            NoiseElement dr = drift_map(right, lambda);
            drifted_then_composed = compose(dl, dr, rule_g);
        } catch (const DriftDegeneracyError&) {
            ++report.skipped;
            continue;
        }
        const bool signs_equal = composed_then_drifted.signs == drifted_then_composed.signs;
        if (signs_equal) ++report.passed;
        report.max_path_dev = std::max(
            report.max_path_dev, max_relative_dev(composed_then_drifted.path.values, drifted_then_composed.path.values));
    }
    return report;
}

SignProcess sign_process_at_global_min(const NoiseElement& element, const signs::SignRule& rule, int n_lo, int n_hi) {
    if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("sign_process_at_global_min: bad level range");
    const TimeGrid& grid = element.path.grid;
    if (grid.depth() < n_hi)
        throw GridMisalignmentError("sign_process_at_global_min: grid too coarse for requested levels");
    if (element.minima.entries.empty()) throw std::invalid_argument("sign_process_at_global_min: element has no minima");
    // least tracked minimum; composed elements interleave blocks, so the
    // global one need not sit first
    const brownian::MinimumEntry* global = &element.minima.entries.front();
    for (const auto& e : element.minima.entries) {
        if (e.value < global->value || (e.value == global->value && e.index < global->index)) global = &e;
    }
    const std::int64_t tau = global->index;
    const signed char eta = element.signs.at(tau);
    const std::int64_t cells = grid.cells();

    SignProcess process;
    process.tau_index = tau;
    // factor of level m enters S(tau + 3^-n) for every n > m (eps_m > 3^-n)
    auto level_factor = [&](int m, double* value) -> bool {
        if (m < 1 || m > rule.max_level()) return false;
        const std::int64_t te = tau + 2 * grid.steps_in_pow3(m + 1);
        if (te > cells) return false;  // evaluation time beyond the element
        *value = rule.eval(m, element.path.at(te) - element.path.at(tau));
        return true;
    };

    for (int n = n_lo; n <= n_hi; ++n) {
        if (tau + grid.steps_in_pow3(n) >= cells) {
            process.truncated = true;
            continue;  // the restriction time tau + 3^-n is not inside (0, t_end)
        }
        SignProcessPoint pt;
        pt.n = n;
        pt.time = grid.time_at(tau) + 1.0 / static_cast<double>(TimeGrid::pow3(n));
        double sign = static_cast<double>(eta);
        for (int m = 1; m <= n - 1; ++m) {
            double v;
            if (level_factor(m, &v)) sign *= v;
        }
        pt.value = sign > 0 ? static_cast<signed char>(1) : static_cast<signed char>(-1);
        double jump;
        if (level_factor(n - 1, &jump)) {
            pt.jump_factor = jump;
            pt.jump_recorded = true;
        }
        process.points.push_back(pt);
    }
    return process;
}

namespace {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("load_noise_element: truncated stream");
    return v;
}

}  // namespace

void save_noise_element(std::ostream& out, const NoiseElement& element) {
    out.write("DNNE", 4);
    write_pod<std::uint32_t>(out, 1);  // format version
    write_pod<std::int32_t>(out, element.path.grid.depth());
    write_pod<std::int64_t>(out, element.path.grid.cells());
    write_pod<std::uint64_t>(out, element.requested_k);
    write_pod<std::uint8_t>(out, element.short_list ? 1 : 0);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(element.rule_tag.size()));
    out.write(element.rule_tag.data(), static_cast<std::streamsize>(element.rule_tag.size()));
    write_pod<std::int64_t>(out, static_cast<std::int64_t>(element.path.values.size()));
    out.write(reinterpret_cast<const char*>(element.path.values.data()),
              static_cast<std::streamsize>(element.path.values.size() * sizeof(double)));
    write_pod<std::int64_t>(out, static_cast<std::int64_t>(element.minima.entries.size()));
    for (const auto& e : element.minima.entries) write_pod<std::int64_t>(out, e.index);
    // signs as a bit string in enumeration order: bit k set means sign -1
    std::vector<std::uint8_t> bits((element.minima.entries.size() + 7) / 8, 0);
    for (std::size_t k = 0; k < element.minima.entries.size(); ++k) {
        if (element.signs.at(element.minima.entries[k].index) < 0) bits[k / 8] |= static_cast<std::uint8_t>(1u << (k % 8));
    }
    out.write(reinterpret_cast<const char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
}

NoiseElement load_noise_element(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "DNNE", 4) != 0) throw std::runtime_error("load_noise_element: bad magic");
    if (read_pod<std::uint32_t>(in) != 1) throw std::runtime_error("load_noise_element: unsupported version");
    const int depth = read_pod<std::int32_t>(in);
    const std::int64_t cells = read_pod<std::int64_t>(in);
    NoiseElement element;
    element.requested_k = read_pod<std::uint64_t>(in);
    element.short_list = read_pod<std::uint8_t>(in) != 0;
    const std::uint32_t tag_len = read_pod<std::uint32_t>(in);
    element.rule_tag.resize(tag_len);
    in.read(element.rule_tag.data(), tag_len);
    element.path.grid = TimeGrid(depth, cells);
    const std::int64_t n_values = read_pod<std::int64_t>(in);
    if (n_values != cells + 1) throw std::runtime_error("load_noise_element: value count mismatch");
    element.path.values.resize(static_cast<std::size_t>(n_values));
    in.read(reinterpret_cast<char*>(element.path.values.data()),
            static_cast<std::streamsize>(element.path.values.size() * sizeof(double)));
    const std::int64_t n_minima = read_pod<std::int64_t>(in);
    element.minima.entries.resize(static_cast<std::size_t>(n_minima));
    for (auto& e : element.minima.entries) {
        e.index = read_pod<std::int64_t>(in);
        e.value = element.path.at(e.index);
        e.sharpness = std::min(element.path.at(e.index - 1) - e.value, element.path.at(e.index + 1) - e.value);
    }
    std::vector<std::uint8_t> bits((element.minima.entries.size() + 7) / 8, 0);
    in.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
    if (!in) throw std::runtime_error("load_noise_element: truncated stream");
    for (std::size_t k = 0; k < element.minima.entries.size(); ++k) {
        signed char s = (bits[k / 8] >> (k % 8)) & 1 ? static_cast<signed char>(-1) : static_cast<signed char>(1);
        element.signs.entries.emplace_back(element.minima.entries[k].index, s);
    }
    std::sort(element.signs.entries.begin(), element.signs.entries.end());
    return element;
}

}  // namespace driftnoise::noise
