#pragma once

#include "evrnet/tensor.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace evr {

/// Counter-based random numbers. Each draw is a pure function of
/// (seed, frame, index, lane), so degradations are reproducible in any
/// order and from any language:
///
///   mix(z):  z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
///            z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
///   G = 0x9E3779B97F4A7C15 (all arithmetic mod 2^64)
///   z = mix(seed + G * (frame + 1))
///   z = mix(z + G * (index + 1))
///   z = mix(z + G * (lane + 1))
///   uniform = (z >> 11) * 2^-53                        in [0, 1)
///
/// Lanes: 0, 1 gaussian (Box-Muller, cos branch, u1 = 1 - uniform(lane 0));
///        2 salt-and-pepper replace test; 3 salt-or-pepper choice.
namespace rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix(std::uint64_t z) noexcept
{
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t draw(std::uint64_t seed, std::uint64_t frame, std::uint64_t index, std::uint64_t lane) noexcept
{
    std::uint64_t z = mix(seed + kGolden * (frame + 1));
    z = mix(z + kGolden * (index + 1));
    return mix(z + kGolden * (lane + 1));
}

double uniform(std::uint64_t seed, std::uint64_t frame, std::uint64_t index, std::uint64_t lane) noexcept;
double gaussian(std::uint64_t seed, std::uint64_t frame, std::uint64_t index) noexcept;

} // namespace rng

/// Pixel values are in [0, 1] throughout.
struct DegradeSpec
{
    double awgn_variance = 0.0;         ///< sigma^2
    double snp_density = 0.0;           ///< rho
    std::optional<int> quality;         ///< Q in 1..100, block compression when set
    std::uint64_t seed = 0;

    void validate() const;
    std::string describe() const;
};

/// clamp(x + N(0, variance), 0, 1); element index is the flat (c, y, x)
/// offset inside each frame and `frame` is frame_index + n.
Tensor add_awgn(const Tensor& x, double variance, std::uint64_t seed, std::uint64_t frame_index = 0);

/// Each pixel (all channels together) is replaced with probability
/// `density` by 0 or 1 with equal odds.
Tensor add_salt_pepper(const Tensor& x, double density, std::uint64_t seed, std::uint64_t frame_index = 0);

/// AWGN followed by salt-and-pepper.
Tensor add_mixed(const Tensor& x, double variance, double density, std::uint64_t seed, std::uint64_t frame_index = 0);

/// 8x8 DCT quantisation proxy for a lossy codec: step = 0.5 * (101 - Q) / 100.
/// Partial edge blocks are completed by edge replication.
Tensor block_compress(const Tensor& x, int quality);
double quantization_step(int quality);

/// Compression (if any), then AWGN, then salt-and-pepper.
Tensor degrade(const Tensor& x, const DegradeSpec& spec, std::uint64_t frame_index = 0);

} // namespace evr
