#include "evrnet/architecture.hpp"

namespace evr {

namespace {

void conv(std::vector<LayerDesc>& plan, std::string name, Grid grid, ConvSpec spec)
{
    LayerDesc l;
    l.name = std::move(name);
    l.kind = LayerKind::Conv;
    l.grid = grid;
    l.conv = spec;
    plan.push_back(std::move(l));
}

void act(std::vector<LayerDesc>& plan, std::string name, Grid grid, std::uint32_t channels)
{
    LayerDesc l;
    l.name = std::move(name);
    l.kind = LayerKind::PReLU;
    l.grid = grid;
    l.channels = channels;
    plan.push_back(std::move(l));
}

void encoder_decoder(std::vector<LayerDesc>& plan, const std::string& prefix, std::uint32_t in, std::uint32_t n_cu,
                     const NetworkConfig& cfg)
{
    const std::uint32_t d = cfg.width;
    conv(plan, prefix + ".enc.conv0", Grid::Full, ConvSpec::standard(in, d, 5));
    act(plan, prefix + ".enc.act0", Grid::Full, d);
    conv(plan, prefix + ".enc.conv1", Grid::Half, ConvSpec::standard(d, d, 5, 2));
    act(plan, prefix + ".enc.act1", Grid::Half, d);
    conv(plan, prefix + ".enc.pw", Grid::Half, ConvSpec::pointwise(d, d));
    act(plan, prefix + ".enc.act2", Grid::Half, d);

    for (std::uint32_t i = 0; i < n_cu; ++i)
    {
        const std::string cu = prefix + ".cu" + std::to_string(i);
        if (cfg.cu_variant == CuVariant::Multi)
        {
            conv(plan, cu + ".dw3", Grid::Half, ConvSpec::depthwise(d, 3));
            conv(plan, cu + ".dw5", Grid::Half, ConvSpec::depthwise(d, 5));
        }
        conv(plan, cu + ".dw7", Grid::Half, ConvSpec::depthwise(d, 7));
        act(plan, cu + ".act", Grid::Half, d);
        if (cfg.use_se)
        {
            LayerDesc se;
            se.name = cu + ".se";
            se.kind = LayerKind::SqueezeExcite;
            se.grid = Grid::Half;
            se.se = SESpec{d, NetworkConfig::kSeReduction};
            plan.push_back(std::move(se));
        }
        conv(plan, cu + ".pw", Grid::Half, ConvSpec::pointwise(d, d));
    }

    conv(plan, prefix + ".dec.pw", Grid::Full, ConvSpec::pointwise(2 * d, d));
    act(plan, prefix + ".dec.act", Grid::Full, d);
}

} // namespace

std::vector<LayerDesc> layer_plan(const NetworkConfig& config)
{
    config.validate();
    const std::uint32_t d = config.width;
    std::vector<LayerDesc> plan;
    encoder_decoder(plan, "align", NetworkConfig::kAlignmentInputs, config.depths.alignment, config);
    conv(plan, "proj.conv", Grid::Full, ConvSpec::standard(NetworkConfig::kFrameChannels, d, 3));
    act(plan, "proj.act", Grid::Full, d);
    encoder_decoder(plan, "diff", d, config.depths.differential, config);
    encoder_decoder(plan, "fuse", d, config.depths.fusion, config);
    const std::uint32_t shuffled = d / (config.upsample * config.upsample);
    conv(plan, "head.out", Grid::Output, ConvSpec::standard(shuffled, NetworkConfig::kFrameChannels, 3));
    conv(plan, "head.latent", Grid::Full, ConvSpec::pointwise(d, NetworkConfig::kLatentChannels));
    return plan;
}

std::vector<ParamEntry> param_entries(const LayerDesc& layer)
{
    switch (layer.kind)
    {
        case LayerKind::Conv:
        {
            std::vector<ParamEntry> e{{layer.name + ".weight", layer.conv.weight_shape()}};
            if (layer.conv.has_bias)
                e.push_back({layer.name + ".bias", layer.conv.bias_shape()});
            return e;
        }
        case LayerKind::PReLU:
            return {{layer.name + ".slope", Shape{layer.channels, 1, 1, 1}}};
        case LayerKind::SqueezeExcite:
        {
            const std::uint32_t c = layer.se.channels, h = layer.se.hidden();
            return {{layer.name + ".fc1.weight", Shape{h, c, 1, 1}},
                    {layer.name + ".fc1.bias", Shape{h, 1, 1, 1}},
                    {layer.name + ".fc2.weight", Shape{c, h, 1, 1}},
                    {layer.name + ".fc2.bias", Shape{c, 1, 1, 1}}};
        }
    }
    return {};
}

std::vector<ParamEntry> weight_manifest(const NetworkConfig& config)
{
    std::vector<ParamEntry> all;
    for (const LayerDesc& layer : layer_plan(config))
        for (ParamEntry& e : param_entries(layer))
            all.push_back(std::move(e));
    return all;
}

} // namespace evr
