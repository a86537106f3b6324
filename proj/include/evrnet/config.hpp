#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace evr {

enum class CuVariant : std::uint8_t
{
    Single = 0, ///< one 7x7 depthwise branch
    Multi = 1,  ///< parallel 3x3, 5x5 and 7x7 depthwise branches, summed
};

std::string_view to_string(CuVariant v) noexcept;
CuVariant parse_cu_variant(std::string_view text);

struct Depths
{
    std::uint32_t alignment = 5;
    std::uint32_t differential = 2;
    std::uint32_t fusion = 2;

    std::uint32_t total() const noexcept { return alignment + differential + fusion; }
    bool operator==(const Depths&) const = default;
};

struct ConfigError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

/// Architecture hyperparameters of the restoration network.
struct NetworkConfig
{
    static constexpr std::uint32_t kFrameChannels = 3;
    static constexpr std::uint32_t kLatentChannels = 2;
    static constexpr std::uint32_t kAlignmentInputs = 2 * kFrameChannels + kLatentChannels;
    static constexpr std::uint32_t kSeReduction = 4;

    std::uint32_t width = 32; ///< feature channels d
    Depths depths{};
    CuVariant cu_variant = CuVariant::Multi;
    bool use_se = true;
    std::uint32_t upsample = 1; ///< output scale s: 1, 2 or 4

    /// Throws ConfigError when the combination cannot be built.
    void validate() const;
    std::string describe() const;
    bool operator==(const NetworkConfig&) const = default;
};

} // namespace evr
