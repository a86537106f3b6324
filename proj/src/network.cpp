#include "evrnet/network.hpp"

#include "evrnet/layers.hpp"

namespace evr {

namespace {

void check_frame(const Tensor& frame, const char* what)
{
    const Shape& s = frame.shape();
    if (s.n != 1 || s.c != NetworkConfig::kFrameChannels)
        throw ShapeError(std::string(what) + " must be (1,3,H,W), got " + to_string(s));
}

} // namespace

StreamState StreamState::start(const Tensor& first_frame)
{
    check_frame(first_frame, "first frame");
    const Shape& s = first_frame.shape();
    return StreamState{first_frame, Tensor(Shape{1, NetworkConfig::kLatentChannels, s.h, s.w})};
}

Network::Network(WeightStore weights) : m_weights(std::move(weights))
{
    m_weights.config().validate();
    m_weights.validate();
}

Tensor Network::conv(const Tensor& x, const std::string& layer, const ConvSpec& spec) const
{
    const Tensor& w = m_weights.at(layer + ".weight");
    const Tensor& b = m_weights.at(layer + ".bias");
    return conv2d(x, spec, w, b.data());
}

Tensor Network::activate(const Tensor& x, const std::string& layer) const
{
    return prelu(x, m_weights.at(layer + ".slope").data());
}

Tensor Network::cu_forward(const Tensor& x, const std::string& prefix) const
{
    const NetworkConfig& cfg = config();
    const std::uint32_t d = cfg.width;
    if (x.shape().c != d)
        throw ShapeError("CU " + prefix + ": input " + to_string(x.shape()) + " does not have " + std::to_string(d) + " channels");

    Tensor y = conv(x, prefix + ".dw7", ConvSpec::depthwise(d, 7));
    if (cfg.cu_variant == CuVariant::Multi)
    {
        const Tensor b3 = conv(x, prefix + ".dw3", ConvSpec::depthwise(d, 3));
        const Tensor b5 = conv(x, prefix + ".dw5", ConvSpec::depthwise(d, 5));
        y = add(add(b3, b5), y);
    }
    y = activate(y, prefix + ".act");
    if (cfg.use_se)
    {
        const std::string se = prefix + ".se";
        y = se_apply(y, SESpec{d, NetworkConfig::kSeReduction},
                     SEWeights{m_weights.at(se + ".fc1.weight"), m_weights.at(se + ".fc1.bias"), m_weights.at(se + ".fc2.weight"),
                               m_weights.at(se + ".fc2.bias")});
    }
    y = conv(y, prefix + ".pw", ConvSpec::pointwise(d, d));
    return add(x, y);
}

Tensor Network::module_forward(const Tensor& x, const std::string& prefix, std::uint32_t n_cu) const
{
    const std::uint32_t d = config().width;
    const std::uint32_t in = x.shape().c;
    const Tensor skip = activate(conv(x, prefix + ".enc.conv0", ConvSpec::standard(in, d, 5)), prefix + ".enc.act0");
    Tensor y = activate(conv(skip, prefix + ".enc.conv1", ConvSpec::standard(d, d, 5, 2)), prefix + ".enc.act1");
    y = activate(conv(y, prefix + ".enc.pw", ConvSpec::pointwise(d, d)), prefix + ".enc.act2");
    for (std::uint32_t i = 0; i < n_cu; ++i)
        y = cu_forward(y, prefix + ".cu" + std::to_string(i));

    // odd sizes: 2*ceil(n/2) = n + 1, drop the extra row/column
    const Tensor up = center_crop(upsample2x(y), skip.shape().h, skip.shape().w);
    const Tensor merged = concat_channels(up, skip);
    return activate(conv(merged, prefix + ".dec.pw", ConvSpec::pointwise(2 * d, d)), prefix + ".dec.act");
}

FrameOutput Network::forward(const Tensor& cur, const StreamState& state) const
{
    check_frame(cur, "current frame");
    const Shape& s = cur.shape();
    if (state.prev_frame.shape() != s)
        throw ShapeError("previous frame " + to_string(state.prev_frame.shape()) + " does not match current frame " + to_string(s));
    if (state.prev_latent.shape() != Shape{1, NetworkConfig::kLatentChannels, s.h, s.w})
        throw ShapeError("previous latent " + to_string(state.prev_latent.shape()) + " does not match frame " + to_string(s));

    const NetworkConfig& cfg = config();
    const std::uint32_t d = cfg.width;

    const Tensor aligned
        = module_forward(concat_channels(concat_channels(cur, state.prev_frame), state.prev_latent), "align", cfg.depths.alignment);
    const Tensor projected = activate(conv(cur, "proj.conv", ConvSpec::standard(NetworkConfig::kFrameChannels, d, 3)), "proj.act");
    const Tensor detail = module_forward(sub(projected, aligned), "diff", cfg.depths.differential);
    const Tensor fused = module_forward(add(detail, projected), "fuse", cfg.depths.fusion);

    const std::uint32_t ss = cfg.upsample * cfg.upsample;
    FrameOutput out;
    out.restored = conv(pixel_shuffle(fused, cfg.upsample), "head.out", ConvSpec::standard(d / ss, NetworkConfig::kFrameChannels, 3));
    out.latent = conv(fused, "head.latent", ConvSpec::pointwise(d, NetworkConfig::kLatentChannels));
    return out;
}

std::vector<Tensor> Network::restore_sequence(std::span<const Tensor> frames) const
{
    if (frames.empty())
        throw Error("restore_sequence: empty input sequence");
    VideoStream stream(*this);
    std::vector<Tensor> out;
    out.reserve(frames.size());
    for (const Tensor& f : frames)
        out.push_back(stream.push(f));
    return out;
}

Tensor VideoStream::push(const Tensor& frame)
{
    if (!m_state)
        m_state = StreamState::start(frame);
    else if (frame.shape() != m_state->prev_frame.shape())
        throw ShapeError("frame " + std::to_string(m_count) + " has shape " + to_string(frame.shape()) + ", sequence uses "
                         + to_string(m_state->prev_frame.shape()));

    FrameOutput out = m_network->forward(frame, *m_state);
    m_state->prev_frame = frame;
    m_state->prev_latent = std::move(out.latent);
    ++m_count;
    return std::move(out.restored);
}

} // namespace evr
