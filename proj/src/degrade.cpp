#include "evrnet/degrade.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace evr {

namespace rng {

double uniform(std::uint64_t seed, std::uint64_t frame, std::uint64_t index, std::uint64_t lane) noexcept
{
    return double(draw(seed, frame, index, lane) >> 11) * 0x1.0p-53;
}

double gaussian(std::uint64_t seed, std::uint64_t frame, std::uint64_t index) noexcept
{
    const double u1 = 1.0 - uniform(seed, frame, index, 0);
    const double u2 = uniform(seed, frame, index, 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace rng

namespace {

enum Lane : std::uint64_t
{
    kReplace = 2,
    kSalt = 3,
};

void check_pixels(const Tensor& x, const char* op)
{
    for (float v : x.data())
        if (!(v >= 0.0f && v <= 1.0f))
            throw std::invalid_argument(std::string(op) + ": pixel values must lie in [0, 1]");
}

} // namespace

void DegradeSpec::validate() const
{
    if (!(awgn_variance >= 0.0) || !std::isfinite(awgn_variance))
        throw std::invalid_argument("AWGN variance must be finite and >= 0");
    if (!(snp_density >= 0.0 && snp_density <= 1.0))
        throw std::invalid_argument("salt-and-pepper density must lie in [0, 1]");
    if (quality && (*quality < 1 || *quality > 100))
        throw std::invalid_argument("quality factor must lie in 1..100");
}

std::string DegradeSpec::describe() const
{
    std::ostringstream s;
    s << "awgn=" << awgn_variance << " snp=" << snp_density << " quality=" << (quality ? std::to_string(*quality) : "none")
      << " seed=" << seed;
    return s.str();
}

Tensor add_awgn(const Tensor& x, double variance, std::uint64_t seed, std::uint64_t frame_index)
{
    if (!(variance >= 0.0) || !std::isfinite(variance))
        throw std::invalid_argument("add_awgn: variance must be finite and >= 0");
    check_pixels(x, "add_awgn");
    if (variance == 0.0)
        return x;
    const double sigma = std::sqrt(variance);
    const Shape& s = x.shape();
    const std::size_t per_frame = std::size_t(s.c) * s.plane();
    Tensor out(s);
    for (std::uint32_t n = 0; n < s.n; ++n)
        for (std::size_t i = 0; i < per_frame; ++i)
        {
            const std::size_t k = n * per_frame + i;
            const double v = double(x.data()[k]) + sigma * rng::gaussian(seed, frame_index + n, i);
            out.data()[k] = float(std::clamp(v, 0.0, 1.0));
        }
    return out;
}

Tensor add_salt_pepper(const Tensor& x, double density, std::uint64_t seed, std::uint64_t frame_index)
{
    if (!(density >= 0.0 && density <= 1.0))
        throw std::invalid_argument("add_salt_pepper: density must lie in [0, 1]");
    check_pixels(x, "add_salt_pepper");
    if (density == 0.0)
        return x;
    const Shape& s = x.shape();
    Tensor out = x;
    for (std::uint32_t n = 0; n < s.n; ++n)
        for (std::size_t p = 0; p < s.plane(); ++p)
        {
            // uniform < 1 always, so density 1 replaces every pixel
            if (rng::uniform(seed, frame_index + n, p, kReplace) >= density)
                continue;
            const float v = rng::uniform(seed, frame_index + n, p, kSalt) < 0.5 ? 0.0f : 1.0f;
            for (std::uint32_t c = 0; c < s.c; ++c)
                out.plane(n, c)[p] = v;
        }
    return out;
}

Tensor add_mixed(const Tensor& x, double variance, double density, std::uint64_t seed, std::uint64_t frame_index)
{
    return add_salt_pepper(add_awgn(x, variance, seed, frame_index), density, seed, frame_index);
}

double quantization_step(int quality)
{
    if (quality < 1 || quality > 100)
        throw std::invalid_argument("quality factor must lie in 1..100, got " + std::to_string(quality));
    return 0.5 * double(101 - quality) / 100.0;
}

namespace {

constexpr int kBlock = 8;
using Block = std::array<std::array<double, kBlock>, kBlock>;

// basis[u][x] = c(u) cos((2x + 1) u pi / 16), orthonormal
const Block& dct_basis()
{
    static const Block basis = [] {
        Block b{};
        for (int u = 0; u < kBlock; ++u)
        {
            const double cu = u == 0 ? std::sqrt(1.0 / kBlock) : std::sqrt(2.0 / kBlock);
            for (int x = 0; x < kBlock; ++x)
                b[u][x] = cu * std::cos((2 * x + 1) * u * std::numbers::pi / (2.0 * kBlock));
        }
        return b;
    }();
    return basis;
}

Block forward_dct(const Block& px)
{
    const Block& b = dct_basis();
    Block tmp{}, out{};
    for (int y = 0; y < kBlock; ++y)
        for (int u = 0; u < kBlock; ++u)
        {
            double acc = 0.0;
            for (int x = 0; x < kBlock; ++x)
                acc += b[u][x] * px[y][x];
            tmp[y][u] = acc;
        }
    for (int v = 0; v < kBlock; ++v)
        for (int u = 0; u < kBlock; ++u)
        {
            double acc = 0.0;
            for (int y = 0; y < kBlock; ++y)
                acc += b[v][y] * tmp[y][u];
            out[v][u] = acc;
        }
    return out;
}

Block inverse_dct(const Block& coef)
{
    const Block& b = dct_basis();
    Block tmp{}, out{};
    for (int v = 0; v < kBlock; ++v)
        for (int x = 0; x < kBlock; ++x)
        {
            double acc = 0.0;
            for (int u = 0; u < kBlock; ++u)
                acc += b[u][x] * coef[v][u];
            tmp[v][x] = acc;
        }
    for (int y = 0; y < kBlock; ++y)
        for (int x = 0; x < kBlock; ++x)
        {
            double acc = 0.0;
            for (int v = 0; v < kBlock; ++v)
                acc += b[v][y] * tmp[v][x];
            out[y][x] = acc;
        }
    return out;
}

} // namespace

Tensor block_compress(const Tensor& x, int quality)
{
    const double step = quantization_step(quality);
    check_pixels(x, "block_compress");
    const Shape& s = x.shape();
    Tensor out(s);
    for (std::uint32_t n = 0; n < s.n; ++n)
        for (std::uint32_t c = 0; c < s.c; ++c)
        {
            auto src = x.plane(n, c);
            auto dst = out.plane(n, c);
            for (std::uint32_t by = 0; by < s.h; by += kBlock)
                for (std::uint32_t bx = 0; bx < s.w; bx += kBlock)
                {
                    Block px{};
                    for (int y = 0; y < kBlock; ++y)
                        for (int xx = 0; xx < kBlock; ++xx)
                        {
                            const std::uint32_t sy = std::min(by + y, s.h - 1);
                            const std::uint32_t sx = std::min(bx + xx, s.w - 1);
                            px[y][xx] = src[std::size_t(sy) * s.w + sx];
                        }
                    Block coef = forward_dct(px);
                    for (auto& row : coef)
                        for (double& v : row)
                            v = std::round(v / step) * step;
                    const Block rec = inverse_dct(coef);
                    for (int y = 0; y < kBlock && by + y < s.h; ++y)
                        for (int xx = 0; xx < kBlock && bx + xx < s.w; ++xx)
                            dst[std::size_t(by + y) * s.w + bx + xx] = float(std::clamp(rec[y][xx], 0.0, 1.0));
                }
        }
    return out;
}

Tensor degrade(const Tensor& x, const DegradeSpec& spec, std::uint64_t frame_index)
{
    spec.validate();
    Tensor y = spec.quality ? block_compress(x, *spec.quality) : x;
    return add_mixed(y, spec.awgn_variance, spec.snp_density, spec.seed, frame_index);
}

} // namespace evr
