#pragma once

#include "evrnet/architecture.hpp"
#include "evrnet/config.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace evr {

// Counting conventions:
//   conv params = out * in/groups * kh * kw + out (bias)
//   conv MACs   = out * in/groups * kh * kw * Hout * Wout
//   SE params   = 2 * c*c/r + c/r + c,  SE MACs = 2 * c*c/r (fc layers) + c*h*w (channel gating)
//   PReLU       = c params, 0 MACs
// Additions, activations, interpolation and pixel shuffle cost nothing.

std::uint64_t layer_params(const LayerDesc& layer);
std::uint64_t layer_macs(const LayerDesc& layer, std::uint32_t h, std::uint32_t w, std::uint32_t upsample);

std::uint64_t count_params(const NetworkConfig& config);
std::uint64_t count_macs(const NetworkConfig& config, std::uint32_t h, std::uint32_t w);

struct AuditRow
{
    std::string layer;
    std::string module;
    std::uint64_t params = 0;
    std::uint64_t macs = 0;
};

struct AuditReport
{
    NetworkConfig config;
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::vector<AuditRow> rows;
    std::vector<std::string> module_order;
    std::map<std::string, AuditRow> modules; ///< keyed by module name; `layer` is unused
    std::uint64_t total_params = 0;
    std::uint64_t total_macs = 0;
};

AuditReport audit_report(const NetworkConfig& config, std::uint32_t h, std::uint32_t w);

/// Human-readable table.
std::string render_table(const AuditReport& report, bool per_layer = true);
/// One key=value record per line: config keys, then `layer=`, `module=` and `total.` records.
std::string render_records(const AuditReport& report);

/// Totals recovered from render_records output.
struct AuditTotals
{
    std::uint64_t params = 0;
    std::uint64_t macs = 0;
};
AuditTotals parse_record_totals(const std::string& records);

/// "78.71 K", "10.13 G".
std::string human_count(std::uint64_t value);

} // namespace evr
