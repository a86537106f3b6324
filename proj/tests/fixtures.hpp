#pragma once

// Shared synthetic inputs for tests and the acceptance run.

#include "evrnet/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace fixture {

/// Smooth shading, a few hard edges and fine texture: enough structure that
/// lossy coding degrades it gradually, as with a real photograph.
inline evr::Tensor natural_image(std::uint32_t h, std::uint32_t w, std::uint64_t seed = 0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> grain(0.0, 0.02);
    const double pi = std::numbers::pi;
    evr::Tensor img(evr::Shape{1, 3, h, w});
    for (std::uint32_t y = 0; y < h; ++y)
        for (std::uint32_t x = 0; x < w; ++x)
        {
            const double u = double(x) / w, v = double(y) / h;
            const double ramp = 0.3 + 0.4 * u * (1 - 0.5 * v);
            const double disc = std::hypot(u - 0.6, v - 0.4) < 0.22 ? 0.25 : 0.0;
            const double bars = (int(x / 6) % 2 == 0 && v > 0.7) ? 0.15 : 0.0;
            const double ripple = 0.06 * std::sin(2 * pi * (3 * u + 2 * v)) * std::cos(2 * pi * 5 * v);
            const double n = grain(rng);
            for (std::uint32_t c = 0; c < 3; ++c)
            {
                const double tint = 0.05 * double(c) - 0.05;
                img.at(0, c, y, x) = float(std::clamp(ramp + disc + bars + ripple + tint + n, 0.0, 1.0));
            }
        }
    return img;
}

} // namespace fixture
