#include "evrnet/audit.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace evr {

std::uint64_t layer_params(const LayerDesc& layer)
{
    switch (layer.kind)
    {
        case LayerKind::Conv:
        {
            const ConvSpec& c = layer.conv;
            const std::uint64_t weights = std::uint64_t(c.out_channels) * (c.in_channels / c.groups) * c.kernel_h * c.kernel_w;
            return weights + (c.has_bias ? c.out_channels : 0);
        }
        case LayerKind::PReLU:
            return layer.channels;
        case LayerKind::SqueezeExcite:
        {
            const std::uint64_t c = layer.se.channels, h = layer.se.hidden();
            return 2 * c * h + h + c;
        }
    }
    return 0;
}

std::uint64_t layer_macs(const LayerDesc& layer, std::uint32_t h, std::uint32_t w, std::uint32_t upsample)
{
    std::uint64_t gh = h, gw = w;
    switch (layer.grid)
    {
        case Grid::Full:
            break;
        case Grid::Half:
            gh = (h + 1) / 2;
            gw = (w + 1) / 2;
            break;
        case Grid::Output:
            gh = std::uint64_t(h) * upsample;
            gw = std::uint64_t(w) * upsample;
            break;
    }
    switch (layer.kind)
    {
        case LayerKind::Conv:
        {
            // the plan stores each layer's output grid, so stride is already applied
            const ConvSpec& c = layer.conv;
            return std::uint64_t(c.out_channels) * (c.in_channels / c.groups) * c.kernel_h * c.kernel_w * gh * gw;
        }
        case LayerKind::PReLU:
            return 0;
        case LayerKind::SqueezeExcite:
        {
            const std::uint64_t c = layer.se.channels, hid = layer.se.hidden();
            return c * gh * gw + 2 * c * hid;
        }
    }
    return 0;
}

std::uint64_t count_params(const NetworkConfig& config)
{
    std::uint64_t total = 0;
    for (const LayerDesc& l : layer_plan(config))
        total += layer_params(l);
    return total;
}

std::uint64_t count_macs(const NetworkConfig& config, std::uint32_t h, std::uint32_t w)
{
    if (h == 0 || w == 0)
        throw std::invalid_argument("count_macs: resolution must be positive");
    std::uint64_t total = 0;
    for (const LayerDesc& l : layer_plan(config))
        total += layer_macs(l, h, w, config.upsample);
    return total;
}

AuditReport audit_report(const NetworkConfig& config, std::uint32_t h, std::uint32_t w)
{
    if (h == 0 || w == 0)
        throw std::invalid_argument("audit_report: resolution must be positive");
    AuditReport r;
    r.config = config;
    r.height = h;
    r.width = w;
    for (const LayerDesc& l : layer_plan(config))
    {
        AuditRow row{l.name, l.module(), layer_params(l), layer_macs(l, h, w, config.upsample)};
        auto [it, fresh] = r.modules.try_emplace(row.module, AuditRow{"", row.module, 0, 0});
        if (fresh)
            r.module_order.push_back(row.module);
        it->second.params += row.params;
        it->second.macs += row.macs;
        r.total_params += row.params;
        r.total_macs += row.macs;
        r.rows.push_back(std::move(row));
    }
    return r;
}

std::string human_count(std::uint64_t value)
{
    char buf[32];
    if (value >= 1000000000ull)
        std::snprintf(buf, sizeof(buf), "%.2f G", double(value) / 1e9);
    else if (value >= 1000000ull)
        std::snprintf(buf, sizeof(buf), "%.2f M", double(value) / 1e6);
    else if (value >= 1000ull)
        std::snprintf(buf, sizeof(buf), "%.2f K", double(value) / 1e3);
    else
        std::snprintf(buf, sizeof(buf), "%llu", static_cast<unsigned long long>(value));
    return buf;
}

std::string render_table(const AuditReport& report, bool per_layer)
{
    std::ostringstream out;
    char line[160];
    out << "network: " << report.config.describe() << "\n";
    out << "resolution: " << report.width << "x" << report.height << " (WxH)\n\n";
    if (per_layer)
    {
        std::snprintf(line, sizeof(line), "%-28s %14s %18s\n", "layer", "params", "MACs");
        out << line;
        for (const AuditRow& row : report.rows)
        {
            std::snprintf(line, sizeof(line), "%-28s %14llu %18llu\n", row.layer.c_str(),
                          static_cast<unsigned long long>(row.params), static_cast<unsigned long long>(row.macs));
            out << line;
        }
        out << "\n";
    }
    std::snprintf(line, sizeof(line), "%-28s %14s %18s\n", "module", "params", "MACs");
    out << line;
    for (const std::string& m : report.module_order)
    {
        const AuditRow& row = report.modules.at(m);
        std::snprintf(line, sizeof(line), "%-28s %14llu %18llu\n", m.c_str(), static_cast<unsigned long long>(row.params),
                      static_cast<unsigned long long>(row.macs));
        out << line;
    }
    std::snprintf(line, sizeof(line), "%-28s %14llu %18llu\n", "total", static_cast<unsigned long long>(report.total_params),
                  static_cast<unsigned long long>(report.total_macs));
    out << line;
    out << "total params: " << human_count(report.total_params) << "\n";
    out << "total MACs: " << human_count(report.total_macs) << "\n";
    return out.str();
}

std::string render_records(const AuditReport& report)
{
    std::ostringstream out;
    const NetworkConfig& c = report.config;
    out << "config d=" << c.width << " depths=" << c.depths.alignment << "," << c.depths.differential << "," << c.depths.fusion
        << " cu=" << to_string(c.cu_variant) << " se=" << (c.use_se ? "on" : "off") << " s=" << c.upsample << "\n";
    out << "resolution height=" << report.height << " width=" << report.width << "\n";
    for (const AuditRow& row : report.rows)
        out << "layer name=" << row.layer << " module=" << row.module << " params=" << row.params << " macs=" << row.macs << "\n";
    for (const std::string& m : report.module_order)
    {
        const AuditRow& row = report.modules.at(m);
        out << "module name=" << m << " params=" << row.params << " macs=" << row.macs << "\n";
    }
    out << "total params=" << report.total_params << " macs=" << report.total_macs << "\n";
    return out.str();
}

AuditTotals parse_record_totals(const std::string& records)
{
    std::istringstream in(records);
    std::string line;
    while (std::getline(in, line))
    {
        std::istringstream fields(line);
        std::string tag;
        fields >> tag;
        if (tag != "total")
            continue;
        AuditTotals t;
        bool have_params = false, have_macs = false;
        std::string kv;
        while (fields >> kv)
        {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("malformed record field '" + kv + "'");
            const std::string key = kv.substr(0, eq);
            const std::uint64_t value = std::stoull(kv.substr(eq + 1));
            if (key == "params")
                t.params = value, have_params = true;
            else if (key == "macs")
                t.macs = value, have_macs = true;
        }
        if (!have_params || !have_macs)
            throw std::invalid_argument("total record lacks params or macs");
        return t;
    }
    throw std::invalid_argument("no total record found");
}

} // namespace evr
