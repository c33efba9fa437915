#pragma once

// Counter-based noise: (master_seed, stream_id, counter) -> Gaussian block is a
// pure function, so paths can be generated in any order on any worker.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace intertwine::engine {

struct NoiseStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
    std::uint64_t counter = 0;

    NoiseStream at(std::uint64_t c) const { return {master_seed, stream_id, c}; }

    bool operator==(const NoiseStream&) const = default;
};

/// Counter used for one-off draws at path start (Haar initialization).
inline constexpr std::uint64_t kInitCounter = ~std::uint64_t{0};

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., Random123).
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/// Uniform variates on the open interval (0, 1), two per Philox block.
void uniforms(const NoiseStream& stream, std::span<double> out);

/// Standard normal variates (Box–Muller), two per Philox block.
void standard_normals(const NoiseStream& stream, std::span<double> out);

/// k independent N(0, h) increments for the step addressed by `stream.counter`.
std::vector<double> gauss_increments(const NoiseStream& stream, std::size_t k, double h);
void gauss_increments(const NoiseStream& stream, double h, std::span<double> out);

} // namespace intertwine::engine
