#include "intertwine/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace intertwine::engine {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline PhiloxCounter philox_round(const PhiloxCounter& c, const PhiloxKey& k) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline PhiloxCounter block(const NoiseStream& s, std::uint32_t sub) {
    if (s.stream_id > 0xFFFFFFFFull) {
        throw std::invalid_argument("noise stream id exceeds 32 bits");
    }
    const PhiloxCounter ctr{sub, static_cast<std::uint32_t>(s.counter),
                            static_cast<std::uint32_t>(s.counter >> 32),
                            static_cast<std::uint32_t>(s.stream_id)};
    const PhiloxKey key{static_cast<std::uint32_t>(s.master_seed),
                        static_cast<std::uint32_t>(s.master_seed >> 32)};
    return philox4x32_10(ctr, key);
}

// 53-bit mantissa, offset by half an ulp so the result is never 0 or 1.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t x = (std::uint64_t{hi} << 32) | lo;
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        ctr = philox_round(ctr, key);
    }
    return ctr;
}

void uniforms(const NoiseStream& stream, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); i += 2) {
        const auto b = block(stream, static_cast<std::uint32_t>(i / 2));
        out[i] = to_open_unit(b[0], b[1]);
        if (i + 1 < out.size()) out[i + 1] = to_open_unit(b[2], b[3]);
    }
}

void standard_normals(const NoiseStream& stream, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); i += 2) {
        const auto b = block(stream, static_cast<std::uint32_t>(i / 2));
        const double u1 = to_open_unit(b[0], b[1]);
        const double u2 = to_open_unit(b[2], b[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        out[i] = r * std::cos(phi);
        if (i + 1 < out.size()) out[i + 1] = r * std::sin(phi);
    }
}

void gauss_increments(const NoiseStream& stream, double h, std::span<double> out) {
    if (!(h > 0.0)) throw std::invalid_argument("gauss_increments: h must be positive");
    standard_normals(stream, out);
    const double s = std::sqrt(h);
    for (double& x : out) x *= s;
}

std::vector<double> gauss_increments(const NoiseStream& stream, std::size_t k, double h) {
    std::vector<double> out(k);
    gauss_increments(stream, h, out);
    return out;
}

} // namespace intertwine::engine
