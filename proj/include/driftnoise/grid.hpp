#pragma once

#include <cstdint>
#include <stdexcept>

namespace driftnoise {

/// Triadic time grid on [0, t_end] with step 3^(-depth).
///
/// The grid is stored rationally as (depth, cells): t_end = cells * 3^(-depth),
/// so step * cells = t_end holds exactly and all alignment checks are integer
/// arithmetic.  Triadic spacing makes the level scales 2*3^(-n-1), 3^(-n-1)
/// and 3^(-n) exact grid times whenever depth >= n+1.
class TimeGrid {
  public:
    TimeGrid() : depth_(1), cells_(3) {}  // placeholder grid covering [0,1]

    TimeGrid(int depth, std::int64_t cells) : depth_(depth), cells_(cells) {
        if (depth < 1 || depth > 20) throw std::invalid_argument("TimeGrid: depth must be in [1,20]");
        if (cells < 1 || cells > pow3(depth)) throw std::invalid_argument("TimeGrid: cells must be in [1, 3^depth]");
    }

    /// Grid covering [0,1].
    static TimeGrid unit(int depth) { return TimeGrid(depth, pow3(depth)); }

    int depth() const { return depth_; }
    std::int64_t cells() const { return cells_; }
    std::int64_t points() const { return cells_ + 1; }
    double step() const { return 1.0 / static_cast<double>(pow3(depth_)); }
    double t_end() const { return static_cast<double>(cells_) * step(); }
    double time_at(std::int64_t i) const { return static_cast<double>(i) * step(); }

    /// Number of grid steps in 3^(-m); fails unless depth >= m.
    std::int64_t steps_in_pow3(int m) const {
        if (m > depth_) throw std::invalid_argument("TimeGrid: 3^(-m) below grid resolution");
        return pow3(depth_ - m);
    }

    /// True when the level scale epsilon_n = 2*3^(-n-1) is a whole number of steps.
    bool level_aligned(int n) const { return depth_ >= n + 1; }

    bool operator==(const TimeGrid& other) const = default;

    static std::int64_t pow3(int e) {
        std::int64_t r = 1;
        for (int i = 0; i < e; ++i) r *= 3;
        return r;
    }

  private:
    int depth_;
    std::int64_t cells_;
};

}  // namespace driftnoise
