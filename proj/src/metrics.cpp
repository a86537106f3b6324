#include "evrnet/metrics.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace evr {

double psnr(const Tensor& a, const Tensor& b, double peak)
{
    if (a.shape() != b.shape())
        throw ShapeError("psnr: shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        const double d = double(a.data()[i]) - double(b.data()[i]);
        sum += d * d;
    }
    const double mse = sum / double(a.size());
    if (mse == 0.0)
        return kInfinitePsnr;
    return 10.0 * std::log10(peak * peak / mse);
}

namespace {

using namespace ssim_params;

const std::array<double, kWindow>& gaussian_taps()
{
    static const std::array<double, kWindow> taps = [] {
        std::array<double, kWindow> t{};
        double sum = 0.0;
        for (int i = 0; i < kWindow; ++i)
        {
            const double x = i - kWindow / 2;
            t[i] = std::exp(-x * x / (2.0 * kSigma * kSigma));
            sum += t[i];
        }
        for (double& v : t)
            v /= sum;
        return t;
    }();
    return taps;
}

// Separable Gaussian filter, valid region only.
std::vector<double> filter_valid(const std::vector<double>& img, std::size_t h, std::size_t w)
{
    const auto& g = gaussian_taps();
    const std::size_t oh = h - kWindow + 1, ow = w - kWindow + 1;
    std::vector<double> rows(h * ow);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < ow; ++x)
        {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k)
                acc += g[k] * img[y * w + x + k];
            rows[y * ow + x] = acc;
        }
    std::vector<double> out(oh * ow);
    for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x)
        {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k)
                acc += g[k] * rows[(y + k) * ow + x];
            out[y * ow + x] = acc;
        }
    return out;
}

double ssim_plane(std::span<const float> pa, std::span<const float> pb, std::size_t h, std::size_t w)
{
    const double c1 = (kK1 * kRange) * (kK1 * kRange);
    const double c2 = (kK2 * kRange) * (kK2 * kRange);
    std::vector<double> a(pa.begin(), pa.end()), b(pb.begin(), pb.end());
    std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    const auto mu_a = filter_valid(a, h, w);
    const auto mu_b = filter_valid(b, h, w);
    const auto e_aa = filter_valid(aa, h, w);
    const auto e_bb = filter_valid(bb, h, w);
    const auto e_ab = filter_valid(ab, h, w);

    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i)
    {
        const double ma = mu_a[i], mb = mu_b[i];
        const double var_a = e_aa[i] - ma * ma;
        const double var_b = e_bb[i] - mb * mb;
        const double cov = e_ab[i] - ma * mb;
        const double num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
        const double den = (ma * ma + mb * mb + c1) * (var_a + var_b + c2);
        total += num / den;
    }
    return total / double(mu_a.size());
}

} // namespace

double ssim(const Tensor& a, const Tensor& b)
{
    if (a.shape() != b.shape())
        throw ShapeError("ssim: shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
    const Shape& s = a.shape();
    if (s.h < std::uint32_t(kWindow) || s.w < std::uint32_t(kWindow))
        throw ShapeError("ssim: image " + to_string(s) + " smaller than the " + std::to_string(kWindow) + "x"
                         + std::to_string(kWindow) + " window");
    double total = 0.0;
    for (std::uint32_t n = 0; n < s.n; ++n)
        for (std::uint32_t c = 0; c < s.c; ++c)
            total += ssim_plane(a.plane(n, c), b.plane(n, c), s.h, s.w);
    return total / double(s.n * s.c);
}

Tensor rgb_to_y(const Tensor& x)
{
    const Shape& s = x.shape();
    if (s.c != 3)
        throw ShapeError("rgb_to_y: expected 3 channels, got " + to_string(s));
    Tensor y(Shape{s.n, 1, s.h, s.w});
    for (std::uint32_t n = 0; n < s.n; ++n)
    {
        auto r = x.plane(n, 0), g = x.plane(n, 1), b = x.plane(n, 2);
        auto dst = y.plane(n, 0);
        for (std::size_t i = 0; i < dst.size(); ++i)
            dst[i] = float(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]);
    }
    return y;
}

MetricResult evaluate(const Tensor& reference, const Tensor& test)
{
    const Tensor ry = rgb_to_y(reference);
    const Tensor ty = rgb_to_y(test);
    return MetricResult{psnr(reference, test), ssim(reference, test), psnr(ry, ty), ssim(ry, ty)};
}

} // namespace evr
