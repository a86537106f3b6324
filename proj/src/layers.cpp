#include "evrnet/layers.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace evr {

namespace {

thread_local MacCounter* g_active_counter = nullptr;

std::string describe(const ConvSpec& s)
{
    return "conv(in=" + std::to_string(s.in_channels) + ", out=" + std::to_string(s.out_channels) + ", k="
           + std::to_string(s.kernel_h) + "x" + std::to_string(s.kernel_w) + ", stride=" + std::to_string(s.stride)
           + ", groups=" + std::to_string(s.groups) + ")";
}

} // namespace

MacCounter::MacCounter() : m_parent(g_active_counter)
{
    g_active_counter = this;
}

MacCounter::~MacCounter()
{
    g_active_counter = m_parent;
}

void MacCounter::record(std::uint64_t macs) noexcept
{
    if (g_active_counter != nullptr)
        g_active_counter->m_count += macs;
}

ConvSpec ConvSpec::standard(std::uint32_t in, std::uint32_t out, std::uint32_t k, std::uint32_t stride)
{
    return ConvSpec{in, out, k, k, stride, 1, true};
}

ConvSpec ConvSpec::pointwise(std::uint32_t in, std::uint32_t out)
{
    return ConvSpec{in, out, 1, 1, 1, 1, true};
}

ConvSpec ConvSpec::depthwise(std::uint32_t channels, std::uint32_t k)
{
    return ConvSpec{channels, channels, k, k, 1, channels, true};
}

void ConvSpec::validate() const
{
    if (in_channels == 0 || out_channels == 0)
        throw ShapeError(describe(*this) + ": channel counts must be >= 1");
    if (kernel_h % 2 == 0 || kernel_w % 2 == 0)
        throw ShapeError(describe(*this) + ": kernel sizes must be odd");
    if (stride != 1 && stride != 2)
        throw ShapeError(describe(*this) + ": stride must be 1 or 2");
    if (groups != 1 && !(groups == in_channels && groups == out_channels))
        throw ShapeError(describe(*this) + ": groups must be 1 or equal in == out channels");
}

void SESpec::validate() const
{
    if (channels == 0 || reduction == 0 || channels % reduction != 0)
        throw ShapeError("SE: channels " + std::to_string(channels) + " not divisible by reduction " + std::to_string(reduction));
}

Tensor conv2d(const Tensor& x, const ConvSpec& spec, const Tensor& weight, std::span<const float> bias)
{
    spec.validate();
    const Shape& in = x.shape();
    if (in.c != spec.in_channels)
        throw ShapeError(describe(spec) + ": input has " + std::to_string(in.c) + " channels " + to_string(in));
    if (weight.shape() != spec.weight_shape())
        throw ShapeError(describe(spec) + ": weight shape " + to_string(weight.shape()) + ", expected "
                         + to_string(spec.weight_shape()));
    if (bias.size() != (spec.has_bias ? spec.out_channels : 0u))
        throw ShapeError(describe(spec) + ": bias has " + std::to_string(bias.size()) + " entries");

    const std::uint32_t kh = spec.kernel_h, kw = spec.kernel_w, stride = spec.stride;
    const std::uint32_t pad_y = kh / 2, pad_x = kw / 2;
    const std::uint32_t oh = spec.out_size(in.h), ow = spec.out_size(in.w);
    // (oh-1)*stride + kh can exceed h + 2*pad by one row for stride 2 on odd
    // sizes; the padded plane covers every tap that is read.
    const std::size_t ph = std::max<std::size_t>(in.h + 2 * pad_y, (oh - 1) * stride + kh);
    const std::size_t pw = std::max<std::size_t>(in.w + 2 * pad_x, (ow - 1) * stride + kw);
    const std::uint32_t in_per_group = spec.in_channels / spec.groups;
    const std::uint32_t out_per_group = spec.out_channels / spec.groups;

    // zero-padded copy of every input plane
    std::vector<float> padded(std::size_t(in.n) * in.c * ph * pw, 0.0f);
    for (std::uint32_t n = 0; n < in.n; ++n)
        for (std::uint32_t c = 0; c < in.c; ++c)
        {
            float* dst = padded.data() + (std::size_t(n) * in.c + c) * ph * pw;
            auto src = x.plane(n, c);
            for (std::uint32_t y = 0; y < in.h; ++y)
                std::copy_n(src.begin() + std::size_t(y) * in.w, in.w, dst + (y + pad_y) * pw + pad_x);
        }

    Tensor out(Shape{in.n, spec.out_channels, oh, ow});
    std::uint64_t macs = 0;
    for (std::uint32_t n = 0; n < in.n; ++n)
        for (std::uint32_t oc = 0; oc < spec.out_channels; ++oc)
        {
            std::span<float> acc = out.plane(n, oc);
            const std::uint32_t group = oc / out_per_group;
            for (std::uint32_t j = 0; j < in_per_group; ++j)
            {
                const std::uint32_t ic = group * in_per_group + j;
                const float* src = padded.data() + (std::size_t(n) * in.c + ic) * ph * pw;
                for (std::uint32_t ky = 0; ky < kh; ++ky)
                    for (std::uint32_t kx = 0; kx < kw; ++kx)
                    {
                        const float wv = weight.at(oc, j, ky, kx);
                        for (std::uint32_t oy = 0; oy < oh; ++oy)
                        {
                            const float* row = src + (std::size_t(oy) * stride + ky) * pw + kx;
                            float* dst = acc.data() + std::size_t(oy) * ow;
                            for (std::uint32_t ox = 0; ox < ow; ++ox)
                                dst[ox] += wv * row[std::size_t(ox) * stride];
                        }
                        macs += std::uint64_t(oh) * ow;
                    }
            }
            if (spec.has_bias)
                for (float& v : acc)
                    v += bias[oc];
        }
    MacCounter::record(macs);
    return out;
}

Tensor depthwise_conv2d(const Tensor& x, const ConvSpec& spec, const Tensor& weight, std::span<const float> bias)
{
    if (!spec.is_depthwise() || spec.groups != x.shape().c)
        throw ShapeError(describe(spec) + ": depthwise convolution needs groups == input channels ("
                         + std::to_string(x.shape().c) + ")");
    return conv2d(x, spec, weight, bias);
}

Tensor prelu(const Tensor& x, std::span<const float> slopes)
{
    const Shape& s = x.shape();
    if (slopes.size() != s.c)
        throw ShapeError("prelu: " + std::to_string(slopes.size()) + " slopes for " + std::to_string(s.c) + " channels");
    Tensor out(s);
    for (std::uint32_t n = 0; n < s.n; ++n)
        for (std::uint32_t c = 0; c < s.c; ++c)
        {
            auto src = x.plane(n, c);
            auto dst = out.plane(n, c);
            const float a = slopes[c];
            for (std::size_t i = 0; i < src.size(); ++i)
                dst[i] = src[i] > 0.0f ? src[i] : a * src[i];
        }
    return out;
}

Tensor relu(const Tensor& x)
{
    Tensor out(x.shape());
    std::transform(x.data().begin(), x.data().end(), out.data().begin(), [](float v) { return v > 0.0f ? v : 0.0f; });
    return out;
}

Tensor se_apply(const Tensor& x, const SESpec& spec, const SEWeights& weights)
{
    spec.validate();
    const Shape& s = x.shape();
    const std::uint32_t c = spec.channels, hidden = spec.hidden();
    if (s.c != c)
        throw ShapeError("SE: input " + to_string(s) + " does not have " + std::to_string(c) + " channels");
    if (weights.fc1_weight.shape() != Shape{hidden, c, 1, 1} || weights.fc1_bias.shape() != Shape{hidden, 1, 1, 1}
        || weights.fc2_weight.shape() != Shape{c, hidden, 1, 1} || weights.fc2_bias.shape() != Shape{c, 1, 1, 1})
        throw ShapeError("SE: weight shapes do not match channels=" + std::to_string(c) + " hidden=" + std::to_string(hidden));

    Tensor out(s);
    std::vector<float> squeeze(c), excite(hidden), gate(c);
    for (std::uint32_t n = 0; n < s.n; ++n)
    {
        for (std::uint32_t ch = 0; ch < c; ++ch)
        {
            double sum = 0.0;
            for (float v : x.plane(n, ch))
                sum += v;
            squeeze[ch] = float(sum / double(s.plane()));
        }
        for (std::uint32_t j = 0; j < hidden; ++j)
        {
            float acc = 0.0f;
            for (std::uint32_t ch = 0; ch < c; ++ch)
                acc += weights.fc1_weight.at(j, ch, 0, 0) * squeeze[ch];
            acc += weights.fc1_bias.data()[j];
            excite[j] = acc > 0.0f ? acc : 0.0f;
        }
        for (std::uint32_t ch = 0; ch < c; ++ch)
        {
            float acc = 0.0f;
            for (std::uint32_t j = 0; j < hidden; ++j)
                acc += weights.fc2_weight.at(ch, j, 0, 0) * excite[j];
            acc += weights.fc2_bias.data()[ch];
            gate[ch] = 1.0f / (1.0f + std::exp(-acc));
        }
        for (std::uint32_t ch = 0; ch < c; ++ch)
        {
            auto src = x.plane(n, ch);
            auto dst = out.plane(n, ch);
            for (std::size_t i = 0; i < src.size(); ++i)
                dst[i] = src[i] * gate[ch];
        }
    }
    MacCounter::record(std::uint64_t(s.n) * (std::uint64_t(c) * s.plane() + 2ull * c * hidden));
    return out;
}

namespace {

struct LerpTap
{
    std::uint32_t i0, i1;
    float l0, l1;
};

std::vector<LerpTap> half_pixel_taps(std::uint32_t in, std::uint32_t out)
{
    std::vector<LerpTap> taps(out);
    const float scale = float(in) / float(out);
    for (std::uint32_t o = 0; o < out; ++o)
    {
        const float src = std::max(0.0f, (float(o) + 0.5f) * scale - 0.5f);
        const auto i0 = std::min(std::uint32_t(src), in - 1);
        const std::uint32_t i1 = std::min(i0 + 1, in - 1);
        const float l1 = src - float(i0);
        taps[o] = {i0, i1, 1.0f - l1, l1};
    }
    return taps;
}

} // namespace

Tensor upsample2x(const Tensor& x)
{
    const Shape& s = x.shape();
    const Shape os{s.n, s.c, 2 * s.h, 2 * s.w};
    const auto ty = half_pixel_taps(s.h, os.h);
    const auto tx = half_pixel_taps(s.w, os.w);
    Tensor out(os);
    for (std::uint32_t n = 0; n < s.n; ++n)
        for (std::uint32_t c = 0; c < s.c; ++c)
        {
            auto src = x.plane(n, c);
            auto dst = out.plane(n, c);
            for (std::uint32_t oy = 0; oy < os.h; ++oy)
            {
                const LerpTap& r = ty[oy];
                const float* top = src.data() + std::size_t(r.i0) * s.w;
                const float* bot = src.data() + std::size_t(r.i1) * s.w;
                for (std::uint32_t ox = 0; ox < os.w; ++ox)
                {
                    const LerpTap& q = tx[ox];
                    dst[std::size_t(oy) * os.w + ox]
                        = r.l0 * (q.l0 * top[q.i0] + q.l1 * top[q.i1]) + r.l1 * (q.l0 * bot[q.i0] + q.l1 * bot[q.i1]);
                }
            }
        }
    return out;
}

Tensor center_crop(const Tensor& x, std::uint32_t h, std::uint32_t w)
{
    const Shape& s = x.shape();
    if (h > s.h || w > s.w)
        throw ShapeError("center_crop: (" + std::to_string(h) + "," + std::to_string(w) + ") larger than " + to_string(s));
    if (h == s.h && w == s.w)
        return x;
    const std::uint32_t oy = (s.h - h) / 2, ox = (s.w - w) / 2;
    Tensor out(Shape{s.n, s.c, h, w});
    for (std::uint32_t n = 0; n < s.n; ++n)
        for (std::uint32_t c = 0; c < s.c; ++c)
            for (std::uint32_t y = 0; y < h; ++y)
                for (std::uint32_t xx = 0; xx < w; ++xx)
                    out.at(n, c, y, xx) = x.at(n, c, y + oy, xx + ox);
    return out;
}

Tensor pixel_shuffle(const Tensor& x, std::uint32_t s)
{
    const Shape& in = x.shape();
    if (s == 0 || in.c % (s * s) != 0)
        throw ShapeError("pixel_shuffle: channels " + std::to_string(in.c) + " not divisible by " + std::to_string(s * s));
    if (s == 1)
        return x;
    const std::uint32_t oc = in.c / (s * s);
    Tensor out(Shape{in.n, oc, in.h * s, in.w * s});
    for (std::uint32_t n = 0; n < in.n; ++n)
        for (std::uint32_t c = 0; c < oc; ++c)
            for (std::uint32_t dy = 0; dy < s; ++dy)
                for (std::uint32_t dx = 0; dx < s; ++dx)
                {
                    auto src = x.plane(n, c * s * s + dy * s + dx);
                    for (std::uint32_t y = 0; y < in.h; ++y)
                        for (std::uint32_t xx = 0; xx < in.w; ++xx)
                            out.at(n, c, y * s + dy, xx * s + dx) = src[std::size_t(y) * in.w + xx];
                }
    return out;
}

Tensor pixel_unshuffle(const Tensor& x, std::uint32_t s)
{
    const Shape& in = x.shape();
    if (s == 0 || in.h % s != 0 || in.w % s != 0)
        throw ShapeError("pixel_unshuffle: spatial dims of " + to_string(in) + " not divisible by " + std::to_string(s));
    if (s == 1)
        return x;
    Tensor out(Shape{in.n, in.c * s * s, in.h / s, in.w / s});
    const Shape& os = out.shape();
    for (std::uint32_t n = 0; n < in.n; ++n)
        for (std::uint32_t c = 0; c < in.c; ++c)
            for (std::uint32_t dy = 0; dy < s; ++dy)
                for (std::uint32_t dx = 0; dx < s; ++dx)
                    for (std::uint32_t y = 0; y < os.h; ++y)
                        for (std::uint32_t xx = 0; xx < os.w; ++xx)
                            out.at(n, c * s * s + dy * s + dx, y, xx) = x.at(n, c, y * s + dy, xx * s + dx);
    return out;
}

} // namespace evr
