#include "evrnet/audit.hpp"

#include "evrnet/network.hpp"

#include <doctest.h>

using evr::CuVariant;
using evr::NetworkConfig;

namespace {

NetworkConfig make(CuVariant cu, bool se, evr::Depths depths, std::uint32_t d = 8, std::uint32_t s = 1)
{
    NetworkConfig c;
    c.width = d;
    c.depths = depths;
    c.cu_variant = cu;
    c.use_se = se;
    c.upsample = s;
    return c;
}

const evr::Depths kTriples[] = {{1, 1, 7}, {1, 7, 1}, {7, 1, 1}, {2, 2, 5}, {5, 2, 2}, {3, 3, 3}};

} // namespace

TEST_CASE("closed-form layer costs")
{
    evr::LayerDesc conv;
    conv.name = "x.conv";
    conv.conv = evr::ConvSpec::standard(1, 1, 3, 1);
    CHECK(evr::layer_params(conv) == 10);
    CHECK(evr::layer_macs(conv, 4, 4, 1) == 144);

    evr::LayerDesc strided = conv;
    strided.grid = evr::Grid::Half;
    strided.conv = evr::ConvSpec::standard(2, 4, 5, 2);
    CHECK(evr::layer_params(strided) == 4 * 2 * 25 + 4);
    CHECK(evr::layer_macs(strided, 5, 7, 1) == 4ull * 2 * 25 * 3 * 4);

    evr::LayerDesc dw = conv;
    dw.conv = evr::ConvSpec::depthwise(8, 7);
    CHECK(evr::layer_params(dw) == 8 * 49 + 8);

    evr::LayerDesc se;
    se.name = "x.se";
    se.kind = evr::LayerKind::SqueezeExcite;
    se.se = evr::SESpec{8, 4};
    CHECK(evr::layer_params(se) == 42);
    CHECK(evr::layer_macs(se, 4, 4, 1) == 8 * 16 + 2 * 8 * 2);

    evr::LayerDesc act;
    act.name = "x.act";
    act.kind = evr::LayerKind::PReLU;
    act.channels = 8;
    CHECK(evr::layer_params(act) == 8);
    CHECK(evr::layer_macs(act, 4, 4, 1) == 0);
}

TEST_CASE("parameters depend only on the total depth")
{
    for (CuVariant cu : {CuVariant::Single, CuVariant::Multi})
        for (bool se : {false, true})
        {
            const auto ref = evr::count_params(make(cu, se, kTriples[0]));
            const auto ref_macs = evr::count_macs(make(cu, se, kTriples[0]), 16, 16);
            for (const auto& t : kTriples)
            {
                CHECK(evr::count_params(make(cu, se, t)) == ref);
                CHECK(evr::count_macs(make(cu, se, t), 16, 16) == ref_macs);
            }
        }
}

TEST_CASE("SE cost is independent of the CU variant")
{
    for (const auto& t : kTriples)
    {
        const auto single = evr::count_params(make(CuVariant::Single, true, t)) - evr::count_params(make(CuVariant::Single, false, t));
        const auto multi = evr::count_params(make(CuVariant::Multi, true, t)) - evr::count_params(make(CuVariant::Multi, false, t));
        CHECK(single == multi);
        const std::uint64_t c = 8, h = 2;
        CHECK(single == t.total() * (2 * c * h + h + c));
    }
}

TEST_CASE("MACs scale with the area except the SE fully-connected terms")
{
    for (bool se : {false, true})
    {
        const NetworkConfig cfg = make(CuVariant::Multi, se, {5, 2, 2}, 16, 2);
        const auto small = evr::count_macs(cfg, 16, 24);
        const auto big = evr::count_macs(cfg, 32, 48);
        const std::uint64_t fc = se ? 9ull * 2 * 16 * 4 : 0;
        CHECK(big == 4 * small - 3 * fc);
    }
}

TEST_CASE("analytic MACs equal instrumented MACs")
{
    for (CuVariant cu : {CuVariant::Single, CuVariant::Multi})
        for (bool se : {false, true})
            for (const evr::Depths t : {evr::Depths{1, 1, 1}, evr::Depths{2, 1, 3}})
                for (std::uint32_t s : {1u, 2u})
                {
                    const NetworkConfig cfg = make(cu, se, t, 8, s);
                    CAPTURE(cfg.describe());
                    const evr::Network net(evr::init_random(cfg, 1));
                    for (auto [h, w] : {std::pair{16u, 16u}, {9u, 13u}})
                    {
                        const evr::Tensor f(evr::Shape{1, 3, h, w}, 0.5f);
                        evr::MacCounter counter;
                        (void)net.forward(f, evr::StreamState::start(f));
                        CHECK(counter.count() == evr::count_macs(cfg, h, w));
                    }
                }
}

TEST_CASE("analytic params equal the weight-store element count")
{
    for (CuVariant cu : {CuVariant::Single, CuVariant::Multi})
        for (bool se : {false, true})
            for (std::uint32_t s : {1u, 2u, 4u})
            {
                const NetworkConfig cfg = make(cu, se, {2, 3, 1}, 16, s);
                CHECK(evr::count_params(cfg) == evr::init_constant(cfg, 0.0f).total_elements());
            }
}

TEST_CASE("report totals, modules and records are consistent")
{
    const NetworkConfig cfg = make(CuVariant::Multi, true, {5, 2, 2}, 32);
    const auto report = evr::audit_report(cfg, 360, 640);
    CHECK(report.total_params == evr::count_params(cfg));
    CHECK(report.total_macs == evr::count_macs(cfg, 360, 640));
    std::uint64_t p = 0, m = 0;
    for (const auto& row : report.rows)
    {
        p += row.params;
        m += row.macs;
    }
    CHECK(p == report.total_params);
    CHECK(m == report.total_macs);
    CHECK(report.module_order == std::vector<std::string>{"align", "proj", "diff", "fuse", "head"});
    std::uint64_t mp = 0;
    for (const auto& [name, row] : report.modules)
        mp += row.params;
    CHECK(mp == report.total_params);

    const auto totals = evr::parse_record_totals(evr::render_records(report));
    CHECK(totals.params == report.total_params);
    CHECK(totals.macs == report.total_macs);

    const std::string table = evr::render_table(report);
    CHECK(table.find("total params: " + evr::human_count(report.total_params)) != std::string::npos);
    CHECK(table.find("total MACs: " + evr::human_count(report.total_macs)) != std::string::npos);
    CHECK_THROWS(evr::parse_record_totals("config d=8\n"));
}

TEST_CASE("human_count")
{
    CHECK(evr::human_count(78710) == "78.71 K");
    CHECK(evr::human_count(10130000000ull) == "10.13 G");
    CHECK(evr::human_count(999) == "999");
    CHECK(evr::human_count(2500000) == "2.50 M");
}
