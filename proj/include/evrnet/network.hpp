#pragma once

#include "evrnet/config.hpp"
#include "evrnet/layers.hpp"
#include "evrnet/tensor.hpp"
#include "evrnet/weights.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evr {

/// Recurrent state carried between frames of one video.
struct StreamState
{
    Tensor prev_frame;  ///< (1, 3, H, W)
    Tensor prev_latent; ///< (1, 2, H, W)

    /// Stream start: previous frame is the first frame itself, latent is zero.
    static StreamState start(const Tensor& first_frame);
};

struct FrameOutput
{
    Tensor restored; ///< (1, 3, sH, sW)
    Tensor latent;   ///< (1, 2, H, W)
};

/// The restoration graph bound to one immutable set of weights.
///
/// Per frame:
///   A = align(cur ++ prev ++ latent)
///   P = proj(cur)
///   D = diff(P - A)
///   F = fuse(D + P)
///   restored = head.out(pixel_shuffle(F, s)), latent = head.latent(F)
///
/// A Network is safe to share between threads; every stream keeps its own
/// StreamState.
class Network
{
public:
    /// Validates the store against its embedded config.
    explicit Network(WeightStore weights);

    const NetworkConfig& config() const noexcept { return m_weights.config(); }
    const WeightStore& weights() const noexcept { return m_weights; }

    /// One convolutional unit: depthwise branch(es) -> PReLU -> [SE] -> pointwise, plus identity skip.
    Tensor cu_forward(const Tensor& x, const std::string& prefix) const;
    /// Encoder-decoder module `prefix` (align, diff or fuse) with n_cu units.
    Tensor module_forward(const Tensor& x, const std::string& prefix, std::uint32_t n_cu) const;

    FrameOutput forward(const Tensor& cur, const StreamState& state) const;

    /// Runs a whole clip from a fresh stream; one output per input frame.
    std::vector<Tensor> restore_sequence(std::span<const Tensor> frames) const;

private:
    Tensor conv(const Tensor& x, const std::string& layer, const ConvSpec& spec) const;
    Tensor activate(const Tensor& x, const std::string& layer) const;

    WeightStore m_weights;
};

/// Frame-at-a-time driver around a shared Network.
class VideoStream
{
public:
    explicit VideoStream(const Network& network) : m_network(&network) {}

    /// Restores the next frame and advances the state.
    Tensor push(const Tensor& frame);
    std::size_t frames_seen() const noexcept { return m_count; }
    const std::optional<StreamState>& state() const noexcept { return m_state; }

private:
    const Network* m_network;
    std::optional<StreamState> m_state;
    std::size_t m_count = 0;
};

} // namespace evr
