#pragma once

#include "evrnet/tensor.hpp"

#include <cstdint>
#include <span>

namespace evr {

/// Convolution geometry. Padding is always zero "same" padding of
/// (kernel - 1) / 2 on each side, so the output spatial size is
/// ceil(input / stride).
struct ConvSpec
{
    std::uint32_t in_channels = 1;
    std::uint32_t out_channels = 1;
    std::uint32_t kernel_h = 1;
    std::uint32_t kernel_w = 1;
    std::uint32_t stride = 1;
    std::uint32_t groups = 1;
    bool has_bias = true;

    static ConvSpec standard(std::uint32_t in, std::uint32_t out, std::uint32_t k, std::uint32_t stride = 1);
    static ConvSpec pointwise(std::uint32_t in, std::uint32_t out);
    static ConvSpec depthwise(std::uint32_t channels, std::uint32_t k);

    bool is_depthwise() const noexcept { return groups == in_channels && groups == out_channels; }
    Shape weight_shape() const noexcept { return {out_channels, in_channels / groups, kernel_h, kernel_w}; }
    Shape bias_shape() const noexcept { return {out_channels, 1, 1, 1}; }
    std::uint32_t out_size(std::uint32_t in) const noexcept { return (in + stride - 1) / stride; }

    void validate() const;
};

struct SESpec
{
    std::uint32_t channels = 1;
    std::uint32_t reduction = 4;

    std::uint32_t hidden() const noexcept { return channels / reduction; }
    void validate() const;
};

/// Learnable tensors of one squeeze-and-excitation unit. fc1 maps c -> c/r,
/// fc2 maps c/r -> c; weights are stored as (out, in, 1, 1).
struct SEWeights
{
    const Tensor& fc1_weight;
    const Tensor& fc1_bias;
    const Tensor& fc2_weight;
    const Tensor& fc2_bias;
};

/// Direct cross-correlation with zero padding. Every output element is
/// accumulated over (input channel, kernel row, kernel column) in that
/// order, bias added last, so results are bit-reproducible.
Tensor conv2d(const Tensor& x, const ConvSpec& spec, const Tensor& weight, std::span<const float> bias);
Tensor depthwise_conv2d(const Tensor& x, const ConvSpec& spec, const Tensor& weight, std::span<const float> bias);

Tensor prelu(const Tensor& x, std::span<const float> slopes);
Tensor relu(const Tensor& x);

/// x * sigmoid(fc2(relu(fc1(avgpool(x))))) per channel.
Tensor se_apply(const Tensor& x, const SESpec& spec, const SEWeights& weights);

/// Bilinear 2x upsampling, half-pixel centres (align_corners = false).
Tensor upsample2x(const Tensor& x);

/// Centre crop of the spatial dims to (h, w).
Tensor center_crop(const Tensor& x, std::uint32_t h, std::uint32_t w);

/// out[n][c][y*s+dy][x*s+dx] = in[n][c*s*s + dy*s + dx][y][x]
Tensor pixel_shuffle(const Tensor& x, std::uint32_t s);
Tensor pixel_unshuffle(const Tensor& x, std::uint32_t s);

/// Counts multiply-accumulates executed by conv2d and se_apply on the
/// current thread while an instance is alive. Scopes nest; only the
/// innermost one receives counts.
class MacCounter
{
public:
    MacCounter();
    ~MacCounter();
    MacCounter(const MacCounter&) = delete;
    MacCounter& operator=(const MacCounter&) = delete;

    std::uint64_t count() const noexcept { return m_count; }

    static void record(std::uint64_t macs) noexcept;

private:
    std::uint64_t m_count = 0;
    MacCounter* m_parent = nullptr;
};

} // namespace evr
