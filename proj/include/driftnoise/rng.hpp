#pragma once

#include <array>
#include <cstdint>

namespace driftnoise {

/// Counter-based random stream addressed by (master_seed, stream_id, position).
///
/// The generator is Philox4x64-10 keyed by the pair (master_seed, stream_id);
/// draw number p comes from counter block p/4, word p%4, so any position can
/// be seeked to in O(1) and the output is a pure function of the address.
/// Gaussians use the Wichura AS241 inverse normal CDF (one uniform per
/// gaussian), which keeps golden outputs stable across platforms.
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();
    /// Uniform on the open interval (0,1).
    double next_uniform();
    /// Standard normal via inverse CDF; consumes exactly one draw.
    double next_gaussian();

    void set_position(std::uint64_t pos);
    std::uint64_t position() const { return pos_; }
    std::uint64_t master_seed() const { return key_[0]; }
    std::uint64_t stream_id() const { return key_[1]; }

  private:
    std::array<std::uint64_t, 2> key_;
    std::uint64_t pos_ = 0;
    std::uint64_t block_index_ = ~std::uint64_t{0};
    std::array<std::uint64_t, 4> block_{};

    void load_block(std::uint64_t block_index);
};

/// Hands out replica-indexed streams under one master seed.  Replica i of a
/// Monte Carlo run always consumes stream (master_seed, i), so results do not
/// depend on how replicas are scheduled across workers.
struct RngFamily {
    std::uint64_t master_seed = 0;
    RngStream stream(std::uint64_t stream_id) const { return RngStream(master_seed, stream_id); }
};

/// Inverse standard normal CDF (Wichura's AS241, double precision).
double inverse_normal_cdf(double p);

}  // namespace driftnoise
