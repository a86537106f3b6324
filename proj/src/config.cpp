#include "evrnet/config.hpp"

#include <stdexcept>

namespace evr {

std::string_view to_string(CuVariant v) noexcept
{
    return v == CuVariant::Single ? "single" : "multi";
}

CuVariant parse_cu_variant(std::string_view text)
{
    if (text == "single")
        return CuVariant::Single;
    if (text == "multi")
        return CuVariant::Multi;
    throw ConfigError("unknown CU variant '" + std::string(text) + "' (expected single or multi)");
}

void NetworkConfig::validate() const
{
    if (width == 0)
        throw ConfigError("channel width must be >= 1");
    if (depths.alignment == 0 || depths.differential == 0 || depths.fusion == 0)
        throw ConfigError("module depths must all be >= 1");
    if (upsample != 1 && upsample != 2 && upsample != 4)
        throw ConfigError("upsample factor must be 1, 2 or 4, got " + std::to_string(upsample));
    if (width % (upsample * upsample) != 0)
        throw ConfigError("channel width " + std::to_string(width) + " not divisible by upsample^2 = "
                          + std::to_string(upsample * upsample));
    if (use_se && width % kSeReduction != 0)
        throw ConfigError("channel width " + std::to_string(width) + " not divisible by SE reduction "
                          + std::to_string(kSeReduction));
}

std::string NetworkConfig::describe() const
{
    return "d=" + std::to_string(width) + " depths=" + std::to_string(depths.alignment) + "," + std::to_string(depths.differential)
           + "," + std::to_string(depths.fusion) + " cu=" + std::string(to_string(cu_variant)) + " se=" + (use_se ? "on" : "off")
           + " s=" + std::to_string(upsample);
}

} // namespace evr
