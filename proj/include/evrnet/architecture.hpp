#pragma once

#include "evrnet/config.hpp"
#include "evrnet/layers.hpp"

#include <string>
#include <vector>

namespace evr {

/// Spatial grid a layer's output lives on.
enum class Grid : std::uint8_t
{
    Full,   ///< input resolution (H, W)
    Half,   ///< encoder bottleneck (ceil(H/2), ceil(W/2))
    Output, ///< restored resolution (sH, sW)
};

enum class LayerKind : std::uint8_t
{
    Conv,
    PReLU,
    SqueezeExcite,
};

struct LayerDesc
{
    std::string name;
    LayerKind kind = LayerKind::Conv;
    Grid grid = Grid::Full;
    ConvSpec conv{};          ///< Conv
    SESpec se{};              ///< SqueezeExcite
    std::uint32_t channels{}; ///< PReLU slope count

    /// Top-level module: align, proj, diff, fuse or head.
    std::string module() const { return name.substr(0, name.find('.')); }
};

/// Every learnable layer of the network in canonical order: alignment,
/// projection, differential, fusion, then the two heads; inside an
/// encoder-decoder module the encoder comes first, then the CUs, then the
/// decoder.
///
/// Module template (in -> d):
///   enc.conv0 5x5 s1, enc.act0, enc.conv1 5x5 s2, enc.act1, enc.pw 1x1, enc.act2,
///   cu{i}.{dw7 | dw3,dw5,dw7}, cu{i}.act, [cu{i}.se], cu{i}.pw,
///   dec.pw 1x1 (2d -> d), dec.act
std::vector<LayerDesc> layer_plan(const NetworkConfig& config);

struct ParamEntry
{
    std::string name;
    Shape shape;
};

/// Named tensors a single layer owns, in storage order.
std::vector<ParamEntry> param_entries(const LayerDesc& layer);

/// Flattened param_entries over the whole plan.
std::vector<ParamEntry> weight_manifest(const NetworkConfig& config);

} // namespace evr
