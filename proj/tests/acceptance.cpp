// Acceptance run: one PASS/FAIL line per headline criterion.
// Usage: evrnet_acceptance <path-to-evrnet-executable>

#include "cli_harness.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include "evrnet/audit.hpp"
#include "evrnet/degrade.hpp"
#include "evrnet/layers.hpp"
#include "evrnet/metrics.hpp"
#include "evrnet/network.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using evr::Shape;
using evr::Tensor;

namespace {

struct Outcome
{
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what)
    {
        if (!cond && ok)
        {
            ok = false;
            detail.str("");
            detail << "first failure: " << what;
        }
    }
};

std::uint32_t pick(oracle::Random& rng, int lo, int hi) { return std::uint32_t(rng.integer(lo, hi)); }

void layer_oracles(Outcome& r)
{
    const auto t0 = std::chrono::steady_clock::now();
    oracle::Random rng(2024);
    constexpr int kInstances = 25;
    double worst = 0.0;
    int count = 0;

    for (int i = 0; i < kInstances; ++i)
    {
        const std::uint32_t in = pick(rng, 1, 4), out = pick(rng, 1, 4), k = 2 * pick(rng, 0, 3) + 1, stride = pick(rng, 1, 2);
        const Shape xs{1, in, pick(rng, 1, 12), pick(rng, 1, 12)};
        const evr::ConvSpec spec = evr::ConvSpec::standard(in, out, k, stride);
        const Tensor xi = rng.integer_tensor(xs, -3, 3), wi = rng.integer_tensor(spec.weight_shape(), -2, 2);
        const Tensor bi = rng.integer_tensor(Shape{out, 1, 1, 1}, -2, 2);
        r.require(evr::conv2d(xi, spec, wi, bi.data()) == oracle::conv(xi, wi, oracle::vec(bi), stride, 1), "conv2d integer fixture");
        const Tensor x = rng.tensor(xs), w = rng.tensor(spec.weight_shape()), b = rng.tensor(Shape{out, 1, 1, 1});
        const double e = oracle::max_rel_error(evr::conv2d(x, spec, w, b.data()), oracle::conv(x, w, oracle::vec(b), stride, 1));
        worst = std::max(worst, e);
        r.require(e <= 1e-5, "conv2d random");
        ++count;
    }
    for (int i = 0; i < kInstances; ++i)
    {
        const std::uint32_t c = pick(rng, 1, 6), k = 2 * pick(rng, 1, 3) + 1;
        const Shape xs{1, c, pick(rng, 1, 12), pick(rng, 1, 12)};
        const evr::ConvSpec spec = evr::ConvSpec::depthwise(c, k);
        const Tensor xi = rng.integer_tensor(xs, -3, 3), wi = rng.integer_tensor(spec.weight_shape(), -2, 2);
        const Tensor bi = rng.integer_tensor(Shape{c, 1, 1, 1}, -2, 2);
        r.require(evr::depthwise_conv2d(xi, spec, wi, bi.data()) == oracle::conv(xi, wi, oracle::vec(bi), 1, c),
                  "depthwise integer fixture");
        const Tensor x = rng.tensor(xs), w = rng.tensor(spec.weight_shape()), b = rng.tensor(Shape{c, 1, 1, 1});
        const double e
            = oracle::max_rel_error(evr::depthwise_conv2d(x, spec, w, b.data()), oracle::conv(x, w, oracle::vec(b), 1, c));
        worst = std::max(worst, e);
        r.require(e <= 1e-5, "depthwise random");
        ++count;
    }
    for (int i = 0; i < kInstances; ++i)
    {
        const std::uint32_t c = 4 * pick(rng, 1, 4), h = c / 4;
        const Tensor x = rng.tensor(Shape{1, c, pick(rng, 1, 10), pick(rng, 1, 10)});
        const Tensor w1 = rng.tensor(Shape{h, c, 1, 1}), b1 = rng.tensor(Shape{h, 1, 1, 1});
        const Tensor w2 = rng.tensor(Shape{c, h, 1, 1}), b2 = rng.tensor(Shape{c, 1, 1, 1});
        const double e = oracle::max_rel_error(evr::se_apply(x, evr::SESpec{c, 4}, {w1, b1, w2, b2}), oracle::se(x, w1, b1, w2, b2));
        worst = std::max(worst, e);
        r.require(e <= 1e-5, "se_apply random");
        ++count;
    }
    for (int i = 0; i < kInstances; ++i)
    {
        const std::uint32_t s = 1u << pick(rng, 0, 2);
        const Shape xs{1, s * s * pick(rng, 1, 3), pick(rng, 1, 8), pick(rng, 1, 8)};
        const Tensor xi = rng.integer_tensor(xs, -100, 100);
        r.require(evr::pixel_shuffle(xi, s) == oracle::pixel_shuffle(xi, s), "pixel_shuffle integer fixture");
        const Tensor x = rng.tensor(xs);
        r.require(evr::pixel_shuffle(x, s) == oracle::pixel_shuffle(x, s), "pixel_shuffle random");
        ++count;
    }
    for (int i = 0; i < kInstances; ++i)
    {
        const Shape xs{1, pick(rng, 1, 4), pick(rng, 1, 9), pick(rng, 1, 9)};
        // integer inputs with dyadic tap weights are exact in float
        const Tensor xi = rng.integer_tensor(xs, -8, 8);
        r.require(evr::upsample2x(xi) == oracle::upsample2x(xi), "upsample2x integer fixture");
        const Tensor x = rng.tensor(xs);
        const double e = oracle::max_rel_error(evr::upsample2x(x), oracle::upsample2x(x));
        worst = std::max(worst, e);
        r.require(e <= 1e-5, "upsample2x random");
        ++count;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.require(secs < 60.0, "runtime over one minute");
    if (r.ok)
        r.detail << count << " instances, worst rel err " << worst << ", " << secs << " s";
}

void shape_contract(Outcome& r)
{
    int checked = 0;
    for (std::uint32_t s : {1u, 2u, 4u})
    {
        evr::NetworkConfig cfg;
        cfg.upsample = s;
        const evr::Network net(evr::init_random(cfg, s));
        for (std::uint32_t h : {8u, 17u, 32u, 64u})
            for (std::uint32_t w : {8u, 17u, 32u, 64u})
            {
                const Tensor f(Shape{1, 3, h, w}, 0.5f);
                const auto out = net.forward(f, evr::StreamState::start(f));
                r.require(out.restored.shape() == Shape{1, 3, s * h, s * w} && out.latent.shape() == Shape{1, 2, h, w},
                          "shape at s=" + std::to_string(s) + " " + std::to_string(h) + "x" + std::to_string(w));
                ++checked;
            }
    }
    if (r.ok)
        r.detail << checked << " (s, H, W) combinations";
}

void causality(Outcome& r)
{
    evr::NetworkConfig cfg;
    cfg.width = 16;
    const evr::Network net(evr::init_random(cfg, 8));
    oracle::Random rng(8);
    std::vector<Tensor> frames;
    for (int i = 0; i < 8; ++i)
        frames.push_back(rng.tensor(Shape{1, 3, 16, 16}, 0, 1));
    const auto base = net.restore_sequence(frames);
    for (std::size_t k = 0; k < 8; ++k)
    {
        auto p = frames;
        p[k].at(0, 1, 5, 7) = 1.0f - p[k].at(0, 1, 5, 7);
        const auto out = net.restore_sequence(p);
        for (std::size_t t = 0; t < 8; ++t)
            r.require((out[t] == base[t]) == (t < k), "k=" + std::to_string(k) + " t=" + std::to_string(t));
    }
    if (r.ok)
        r.detail << "k = 0..7, outputs before k bit-identical, outputs from k changed";
}

const evr::Depths kTriples[] = {{1, 1, 7}, {1, 7, 1}, {7, 1, 1}, {2, 2, 5}, {5, 2, 2}, {3, 3, 3}};

void param_invariance(Outcome& r)
{
    evr::NetworkConfig cfg;
    cfg.depths = kTriples[0];
    const auto ref = evr::count_params(cfg);
    for (const auto& t : kTriples)
    {
        cfg.depths = t;
        r.require(evr::count_params(cfg) == ref, "depths " + cfg.describe());
    }
    if (r.ok)
        r.detail << "all six triples: " << ref << " params (d=" << cfg.width << ")";
}

void se_delta(Outcome& r)
{
    std::uint64_t deltas[2]{};
    for (auto cu : {evr::CuVariant::Single, evr::CuVariant::Multi})
    {
        evr::NetworkConfig on, off;
        on.cu_variant = off.cu_variant = cu;
        off.use_se = false;
        deltas[int(cu)] = evr::count_params(on) - evr::count_params(off);
    }
    r.require(deltas[0] == deltas[1], "deltas differ");
    r.detail << "single " << deltas[0] << ", multi " << deltas[1];
}

void mac_audit(Outcome& r)
{
    struct Case
    {
        evr::CuVariant cu;
        bool se;
        evr::Depths depths;
        std::uint32_t s;
    };
    const Case cases[] = {{evr::CuVariant::Single, false, {1, 1, 7}, 1},
                          {evr::CuVariant::Single, true, {2, 2, 5}, 2},
                          {evr::CuVariant::Multi, false, {3, 3, 3}, 4},
                          {evr::CuVariant::Multi, true, {5, 2, 2}, 1}};
    for (const Case& c : cases)
    {
        evr::NetworkConfig cfg;
        cfg.width = 16;
        cfg.cu_variant = c.cu;
        cfg.use_se = c.se;
        cfg.depths = c.depths;
        cfg.upsample = c.s;
        const evr::Network net(evr::init_random(cfg, 1));
        const Tensor f(Shape{1, 3, 16, 16}, 0.25f);
        evr::MacCounter counter;
        (void)net.forward(f, evr::StreamState::start(f));
        const auto analytic = evr::count_macs(cfg, 16, 16);
        r.require(counter.count() == analytic, cfg.describe());
        if (r.ok)
            r.detail << (r.detail.tellp() > 0 ? "; " : "") << analytic;
    }
}

void metrics_oracles(Outcome& r)
{
    oracle::Random rng(77);
    double worst_psnr = 0.0, worst_ssim = 0.0;
    for (int i = 0; i < 20; ++i)
    {
        const Shape s{1, 3, 11 + pick(rng, 0, 12), 11 + pick(rng, 0, 12)};
        const Tensor a = rng.tensor(s, 0, 1);
        Tensor b = a;
        for (float& v : b.data())
            v = std::clamp(v + rng.uniform(-0.3f, 0.3f), 0.0f, 1.0f);
        worst_psnr = std::max(worst_psnr, std::abs(evr::psnr(a, b) - oracle::psnr(a, b)));
        worst_ssim = std::max(worst_ssim, std::abs(evr::ssim(a, b) - oracle::ssim(a, b)));
    }
    r.require(worst_psnr <= 1e-6, "PSNR oracle");
    r.require(worst_ssim <= 1e-5, "SSIM oracle");
    const double analytic = evr::psnr(Tensor(Shape{1, 3, 8, 8}, 0.0f), Tensor(Shape{1, 3, 8, 8}, 0.5f));
    r.require(std::abs(analytic - 6.0206) < 5e-5, "MSE 0.25 case");
    if (r.ok)
    {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "PSNR err %.2e dB, SSIM err %.2e, MSE 0.25 -> %.4f dB", worst_psnr, worst_ssim, analytic);
        r.detail << buf;
    }
}

void degradation_statistics(Outcome& r)
{
    const Tensor grey(Shape{1, 3, 256, 256}, 0.5f);
    const Tensor noisy = evr::add_awgn(grey, 0.01, 1);
    double sum = 0, sq = 0;
    for (float v : noisy.data())
    {
        sum += v - 0.5;
        sq += (v - 0.5) * (v - 0.5);
    }
    const double n = double(noisy.size());
    const double var = sq / n - (sum / n) * (sum / n);
    r.require(std::abs(var - 0.01) <= 0.05 * 0.01, "AWGN variance");

    const Tensor snp = evr::add_salt_pepper(grey, 0.1, 2);
    std::size_t replaced = 0;
    for (std::size_t p = 0; p < snp.shape().plane(); ++p)
        replaced += snp.plane(0, 0)[p] != 0.5f;
    const double frac = double(replaced) / double(snp.shape().plane());
    r.require(std::abs(frac - 0.1) <= 0.01, "S&P fraction");

    const Tensor img = fixture::natural_image(96, 128, 2);
    std::ostringstream curve;
    double prev = 0.0;
    for (int q : {15, 30, 45, 60, 75, 90})
    {
        const double p = evr::psnr(evr::block_compress(img, q), img);
        r.require(p >= prev, "PSNR not monotone at Q=" + std::to_string(q));
        prev = p;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%s%.2f", q == 15 ? "" : "/", p);
        curve << buf;
    }
    if (r.ok)
    {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "var %.5f, S&P %.4f, PSNR(Q) ", var, frac);
        r.detail << buf << curve.str() << " dB";
    }
}

void restore_determinism(Outcome& r, const std::string& exe)
{
    cli::Scratch tmp("acceptance");
    cli::write_clip(tmp / "in", 3, 64, 64);
    const auto q = [](const std::filesystem::path& p) { return "\"" + p.string() + "\""; };
    r.require(cli::run(exe, "init-weights --out " + q(tmp / "w.evrw") + " --seed 5").exit_code == 0, "init-weights");
    for (const char* out : {"a", "b"})
        r.require(cli::run(exe, "restore --weights " + q(tmp / "w.evrw") + " --input " + q(tmp / "in") + " --output " + q(tmp / out))
                          .exit_code
                      == 0,
                  "restore run");
    r.require(cli::same_tree(tmp / "a", tmp / "b"), "outputs differ");
    if (r.ok)
        r.detail << "3 frames at 64x64, default config, byte-identical";
}

} // namespace

int main(int argc, char** argv)
{
    if (argc < 2)
    {
        std::fprintf(stderr, "usage: %s <evrnet executable>\n", argv[0]);
        return 2;
    }
    const std::string exe = argv[1];

    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"layer oracles", layer_oracles},
        {"forward shape contract", shape_contract},
        {"causality probe", causality},
        {"parameter invariance across depth triples", param_invariance},
        {"SE parameter delta equal for both CU variants", se_delta},
        {"analytic MACs equal instrumented MACs", mac_audit},
        {"metric oracles", metrics_oracles},
        {"degradation statistics", degradation_statistics},
        {"restore determinism", [&](Outcome& r) { restore_determinism(r, exe); }},
    };

    int failed = 0;
    for (const auto& [name, fn] : criteria)
    {
        Outcome r;
        try
        {
            fn(r);
        }
        catch (const std::exception& e)
        {
            r.ok = false;
            r.detail.str("");
            r.detail << "exception: " << e.what();
        }
        failed += r.ok ? 0 : 1;
        std::printf("%s  %s  (%s)\n", r.ok ? "PASS" : "FAIL", name.c_str(), r.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
