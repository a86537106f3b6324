// evrnet: restore, degrade, audit and score video frame sequences.

#include "evrnet/audit.hpp"
#include "evrnet/degrade.hpp"
#include "evrnet/image_io.hpp"
#include "evrnet/metrics.hpp"
#include "evrnet/network.hpp"
#include "evrnet/weights.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;

namespace {

constexpr const char* kToolVersion = "0.1.0";

/// Architecture flags shared by restore, audit and init-weights. Unset
/// fields mean "not given on the command line".
struct ConfigFlags
{
    std::optional<std::uint32_t> channels;
    std::optional<std::string> depths;
    std::optional<std::string> cu;
    std::optional<std::string> se;
    std::optional<std::uint32_t> scale;

    void attach(CLI::App& app)
    {
        app.add_option("-d,--channels", channels, "feature channel width d");
        app.add_option("--depths", depths, "module depths N_A,N_D,N_F (e.g. 5,2,2)");
        app.add_option("--cu", cu, "convolutional unit variant")->check(CLI::IsMember({"single", "multi"}));
        app.add_option("--se", se, "squeeze-and-excitation units")->check(CLI::IsMember({"on", "off"}));
        app.add_option("--scale", scale, "output upsampling factor")->check(CLI::IsMember({1, 2, 4}));
    }

    bool any() const { return channels || depths || cu || se || scale; }

    evr::NetworkConfig apply(evr::NetworkConfig cfg) const
    {
        if (channels)
            cfg.width = *channels;
        if (depths)
            cfg.depths = parse_depths(*depths);
        if (cu)
            cfg.cu_variant = evr::parse_cu_variant(*cu);
        if (se)
            cfg.use_se = *se == "on";
        if (scale)
            cfg.upsample = *scale;
        cfg.validate();
        return cfg;
    }

    static evr::Depths parse_depths(const std::string& text)
    {
        evr::Depths d;
        char c1 = 0, c2 = 0;
        std::istringstream in(text);
        if (!(in >> d.alignment >> c1 >> d.differential >> c2 >> d.fusion) || c1 != ',' || c2 != ',' || !(in >> std::ws).eof())
            throw evr::ConfigError("depths must look like N_A,N_D,N_F, got '" + text + "'");
        return d;
    }
};

std::string format_db(double v)
{
    if (std::isinf(v))
        return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.8f", v);
    return buf;
}

std::string format_unit(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.8f", v);
    return buf;
}

struct RestoreArgs
{
    fs::path weights, input, output;
    ConfigFlags config;
};

int cmd_restore(const RestoreArgs& args)
{
    evr::WeightStore store = evr::load_weights(args.weights);
    if (args.config.any())
    {
        const evr::NetworkConfig requested = args.config.apply(store.config());
        if (!(requested == store.config()))
            throw evr::ConfigError("config flags (" + requested.describe() + ") conflict with weight file config ("
                                   + store.config().describe() + ")");
    }
    const evr::Network network(std::move(store));
    const auto files = evr::list_frames(args.input);
    if (files.empty())
        throw evr::Error("no .ppm or .evrt frames in " + args.input.string());
    fs::create_directories(args.output);

    std::cout << "network: " << network.config().describe() << "\n";
    evr::VideoStream stream(network);
    std::optional<evr::Shape> shape;
    double total_ms = 0.0;
    for (std::size_t i = 0; i < files.size(); ++i)
    {
        const evr::Tensor frame = evr::read_frame(files[i]);
        if (!shape)
        {
            shape = frame.shape();
            const std::uint64_t macs = evr::count_macs(network.config(), shape->h, shape->w);
            std::cout << "frame size: " << shape->w << "x" << shape->h << "\n";
            std::cout << "MACs per frame: " << macs << " (" << evr::human_count(macs) << ")\n";
        }
        else if (frame.shape() != *shape)
            throw evr::ShapeError("frame " + std::to_string(i) + " (" + files[i].filename().string() + ") has shape "
                                  + evr::to_string(frame.shape()) + ", sequence uses " + evr::to_string(*shape));

        const auto t0 = std::chrono::steady_clock::now();
        const evr::Tensor restored = stream.push(frame);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        total_ms += ms;
        evr::write_frame(restored, args.output / files[i].filename());
        char line[256];
        std::snprintf(line, sizeof(line), "frame %zu %s %.2f ms\n", i, files[i].filename().string().c_str(), ms);
        std::cout << line;
    }
    char line[128];
    std::snprintf(line, sizeof(line), "restored %zu frames, mean %.2f ms/frame\n", files.size(), total_ms / double(files.size()));
    std::cout << line;
    return 0;
}

struct DegradeArgs
{
    fs::path input, output;
    double awgn = 0.0;
    double snp = 0.0;
    std::vector<double> mixed;
    std::optional<int> quality;
    std::uint64_t seed = 0;
};

int cmd_degrade(const DegradeArgs& args)
{
    evr::DegradeSpec spec;
    spec.awgn_variance = args.awgn;
    spec.snp_density = args.snp;
    if (!args.mixed.empty())
    {
        spec.awgn_variance = args.mixed.at(0);
        spec.snp_density = args.mixed.at(1);
    }
    spec.quality = args.quality;
    spec.seed = args.seed;
    spec.validate();

    const auto files = evr::list_frames(args.input);
    if (files.empty())
        throw evr::Error("no .ppm or .evrt frames in " + args.input.string());
    fs::create_directories(args.output);
    for (std::size_t i = 0; i < files.size(); ++i)
    {
        const evr::Tensor frame = evr::read_frame(files[i]);
        evr::write_frame(evr::degrade(frame, spec, i), args.output / files[i].filename());
    }

    std::ofstream manifest(args.output / "manifest.txt", std::ios::trunc);
    manifest << "tool=evrnet\n"
             << "version=" << kToolVersion << "\n"
             << "rng=splitmix64-counter\n"
             << "order=compress,awgn,snp\n"
             << "seed=" << spec.seed << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", spec.awgn_variance);
    manifest << "awgn=" << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", spec.snp_density);
    manifest << "snp=" << buf << "\n";
    manifest << "quality=" << (spec.quality ? std::to_string(*spec.quality) : "none") << "\n";
    manifest << "frames=" << files.size() << "\n";
    for (std::size_t i = 0; i < files.size(); ++i)
        manifest << "frame." << i << "=" << files[i].filename().string() << "\n";
    if (!manifest)
        throw evr::Error("cannot write manifest in " + args.output.string());

    std::cout << "degraded " << files.size() << " frames (" << spec.describe() << ")\n";
    return 0;
}

struct AuditArgs
{
    ConfigFlags config;
    std::uint32_t height = 360;
    std::uint32_t width = 640;
    bool records = false;
    bool modules_only = false;
};

int cmd_audit(const AuditArgs& args)
{
    const evr::NetworkConfig cfg = args.config.apply(evr::NetworkConfig{});
    if (args.height < 8 || args.width < 8)
        throw evr::ConfigError("audit resolution must be at least 8x8");
    const evr::AuditReport report = evr::audit_report(cfg, args.height, args.width);
    std::cout << (args.records ? evr::render_records(report) : evr::render_table(report, !args.modules_only));
    return 0;
}

struct MetricsArgs
{
    fs::path ref, test;
    std::string space = "both";
};

int cmd_metrics(const MetricsArgs& args)
{
    const auto ref_files = evr::list_frames(args.ref);
    const auto test_files = evr::list_frames(args.test);
    if (ref_files.empty())
        throw evr::Error("no frames in " + args.ref.string());
    if (ref_files.size() != test_files.size())
        throw evr::Error("frame count mismatch: " + std::to_string(ref_files.size()) + " reference vs "
                         + std::to_string(test_files.size()) + " test frames");

    const bool rgb = args.space != "y";
    const bool luma = args.space != "rgb";
    char line[256];
    std::string header = "frame                ";
    if (rgb)
        header += "  PSNR-RGB(dB)      SSIM-RGB";
    if (luma)
        header += "    PSNR-Y(dB)        SSIM-Y";
    std::cout << header << "\n";

    evr::MetricResult sum;
    for (std::size_t i = 0; i < ref_files.size(); ++i)
    {
        const evr::Tensor ref = evr::read_frame(ref_files[i]);
        const evr::Tensor test = evr::read_frame(test_files[i]);
        if (ref.shape() != test.shape())
            throw evr::ShapeError("frame " + std::to_string(i) + ": reference " + evr::to_string(ref.shape()) + " vs test "
                                  + evr::to_string(test.shape()));
        const evr::MetricResult m = evr::evaluate(ref, test);
        sum.psnr_rgb += m.psnr_rgb;
        sum.ssim_rgb += m.ssim_rgb;
        sum.psnr_y += m.psnr_y;
        sum.ssim_y += m.ssim_y;
        std::string row = ref_files[i].filename().string();
        row.resize(std::max<std::size_t>(row.size(), 21), ' ');
        if (rgb)
        {
            std::snprintf(line, sizeof(line), " %14s %13s", format_db(m.psnr_rgb).c_str(), format_unit(m.ssim_rgb).c_str());
            row += line;
        }
        if (luma)
        {
            std::snprintf(line, sizeof(line), " %14s %13s", format_db(m.psnr_y).c_str(), format_unit(m.ssim_y).c_str());
            row += line;
        }
        std::cout << row << "\n";
    }
    const double n = double(ref_files.size());
    std::string row = "mean                 ";
    if (rgb)
    {
        std::snprintf(line, sizeof(line), " %14s %13s", format_db(sum.psnr_rgb / n).c_str(), format_unit(sum.ssim_rgb / n).c_str());
        row += line;
    }
    if (luma)
    {
        std::snprintf(line, sizeof(line), " %14s %13s", format_db(sum.psnr_y / n).c_str(), format_unit(sum.ssim_y / n).c_str());
        row += line;
    }
    std::cout << row << "\n";
    return 0;
}

struct InitArgs
{
    fs::path out;
    std::uint64_t seed = 0;
    ConfigFlags config;
};

int cmd_init(const InitArgs& args)
{
    const evr::NetworkConfig cfg = args.config.apply(evr::NetworkConfig{});
    evr::save_weights(evr::init_random(cfg, args.seed), args.out);
    std::cout << "wrote " << args.out.string() << " (" << cfg.describe() << ", " << evr::count_params(cfg) << " params)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"evrnet: recurrent video restoration engine and analysis tools"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    RestoreArgs restore;
    auto* restore_cmd = app.add_subcommand("restore", "restore a frame sequence with a weight file");
    restore_cmd->add_option("--weights", restore.weights, "EVRW weight file")->required();
    restore_cmd->add_option("--input", restore.input, "directory of input frames")->required();
    restore_cmd->add_option("--output", restore.output, "directory for restored frames")->required();
    restore.config.attach(*restore_cmd);

    DegradeArgs degrade;
    auto* degrade_cmd = app.add_subcommand("degrade", "apply compression and transmission noise to a frame sequence");
    degrade_cmd->add_option("--input", degrade.input, "directory of clean frames")->required();
    degrade_cmd->add_option("--output", degrade.output, "directory for degraded frames")->required();
    auto* awgn = degrade_cmd->add_option("--awgn", degrade.awgn, "AWGN variance sigma^2 (pixels in [0,1])");
    auto* snp = degrade_cmd->add_option("--snp", degrade.snp, "salt-and-pepper density rho");
    degrade_cmd->add_option("--mixed", degrade.mixed, "AWGN variance and S&P density, e.g. --mixed 0.001 0.1")
        ->expected(2)
        ->excludes(awgn)
        ->excludes(snp);
    degrade_cmd->add_option("--quality", degrade.quality, "block-compression quality factor Q (1..100)");
    degrade_cmd->add_option("--seed", degrade.seed, "noise seed");

    AuditArgs audit;
    auto* audit_cmd = app.add_subcommand("audit", "print parameter and MAC counts");
    audit.config.attach(*audit_cmd);
    audit_cmd->add_option("--height", audit.height, "frame height")->capture_default_str();
    audit_cmd->add_option("--width", audit.width, "frame width")->capture_default_str();
    audit_cmd->add_flag("--records", audit.records, "machine-readable key=value records");
    audit_cmd->add_flag("--modules-only", audit.modules_only, "omit per-layer rows");

    MetricsArgs metrics;
    auto* metrics_cmd = app.add_subcommand("metrics", "PSNR/SSIM of a test sequence against a reference");
    metrics_cmd->add_option("--ref", metrics.ref, "reference frame directory")->required();
    metrics_cmd->add_option("--test", metrics.test, "test frame directory")->required();
    metrics_cmd->add_option("--space", metrics.space, "colour space")->check(CLI::IsMember({"rgb", "y", "both"}))->capture_default_str();

    InitArgs init;
    auto* init_cmd = app.add_subcommand("init-weights", "write a seeded random weight file");
    init_cmd->add_option("--out", init.out, "output EVRW file")->required();
    init_cmd->add_option("--seed", init.seed, "initialisation seed");
    init.config.attach(*init_cmd);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (restore_cmd->parsed())
            return cmd_restore(restore);
        if (degrade_cmd->parsed())
            return cmd_degrade(degrade);
        if (audit_cmd->parsed())
            return cmd_audit(audit);
        if (metrics_cmd->parsed())
            return cmd_metrics(metrics);
        if (init_cmd->parsed())
            return cmd_init(init);
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
