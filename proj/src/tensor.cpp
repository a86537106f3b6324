#include "evrnet/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace evr {

std::string to_string(const Shape& s)
{
    return "(" + std::to_string(s.n) + "," + std::to_string(s.c) + "," + std::to_string(s.h) + "," + std::to_string(s.w) + ")";
}

void check_shape(const Shape& s)
{
    if (s.n == 0 || s.c == 0 || s.h == 0 || s.w == 0)
        throw ShapeError("tensor dims must be >= 1, got " + to_string(s));
}

Tensor::Tensor(Shape shape, float fill) : m_shape(shape)
{
    check_shape(shape);
    m_data.assign(shape.volume(), fill);
}

Tensor::Tensor(Shape shape, std::vector<float> values) : m_shape(shape), m_data(std::move(values))
{
    check_shape(shape);
    if (m_data.size() != shape.volume())
        throw ShapeError("tensor " + to_string(shape) + " needs " + std::to_string(shape.volume()) + " values, got "
                         + std::to_string(m_data.size()));
}

bool Tensor::operator==(const Tensor& other) const noexcept
{
    if (m_shape != other.m_shape)
        return false;
    // bitwise, so that -0.0 vs 0.0 and NaN payloads compare as stored
    return std::memcmp(m_data.data(), other.m_data.data(), m_data.size() * sizeof(float)) == 0;
}

Tensor concat_channels(const Tensor& a, const Tensor& b)
{
    const Shape& sa = a.shape();
    const Shape& sb = b.shape();
    if (sa.n != sb.n || sa.h != sb.h || sa.w != sb.w)
        throw ShapeError("concat_channels: incompatible shapes " + to_string(sa) + " and " + to_string(sb));

    Tensor out(Shape{sa.n, sa.c + sb.c, sa.h, sa.w});
    auto dst = out.data().begin();
    const std::size_t block_a = std::size_t(sa.c) * sa.plane();
    const std::size_t block_b = std::size_t(sb.c) * sb.plane();
    for (std::uint32_t n = 0; n < sa.n; ++n)
    {
        dst = std::copy_n(a.data().begin() + n * block_a, block_a, dst);
        dst = std::copy_n(b.data().begin() + n * block_b, block_b, dst);
    }
    return out;
}

Tensor slice_channels(const Tensor& x, std::uint32_t first, std::uint32_t count)
{
    const Shape& s = x.shape();
    if (count == 0 || first + count > s.c)
        throw ShapeError("slice_channels: [" + std::to_string(first) + ", " + std::to_string(first + count) + ") out of range for "
                         + to_string(s));
    Tensor out(Shape{s.n, count, s.h, s.w});
    auto dst = out.data().begin();
    for (std::uint32_t n = 0; n < s.n; ++n)
    {
        const auto src = x.data().begin() + x.index(n, first, 0, 0);
        dst = std::copy_n(src, std::size_t(count) * s.plane(), dst);
    }
    return out;
}

namespace {

template <typename Op>
Tensor zip(const Tensor& a, const Tensor& b, const char* name, Op op)
{
    if (a.shape() != b.shape())
        throw ShapeError(std::string(name) + ": shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
    Tensor out(a.shape());
    std::transform(a.data().begin(), a.data().end(), b.data().begin(), out.data().begin(), op);
    if (!all_finite(out))
        throw Error(std::string(name) + ": result is not finite");
    return out;
}

} // namespace

Tensor add(const Tensor& a, const Tensor& b)
{
    return zip(a, b, "add", [](float x, float y) { return x + y; });
}

Tensor sub(const Tensor& a, const Tensor& b)
{
    return zip(a, b, "sub", [](float x, float y) { return x - y; });
}

bool all_finite(const Tensor& t) noexcept
{
    return std::all_of(t.data().begin(), t.data().end(), [](float v) { return std::isfinite(v); });
}

float max_abs_diff(const Tensor& a, const Tensor& b)
{
    if (a.shape() != b.shape())
        throw ShapeError("max_abs_diff: shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
    float m = 0.0f;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
    return m;
}

namespace detail {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v)
{
    out.push_back(std::uint8_t(v));
    out.push_back(std::uint8_t(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(std::uint8_t(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, float v)
{
    put_u32(out, std::bit_cast<std::uint32_t>(v));
}

void ByteReader::need(std::size_t count) const
{
    if (remaining() < count)
        throw FormatError("truncated file: needed " + std::to_string(count) + " more bytes at offset " + std::to_string(m_pos)
                          + ", have " + std::to_string(remaining()));
}

std::uint8_t ByteReader::u8()
{
    need(1);
    return m_bytes[m_pos++];
}

std::uint16_t ByteReader::u16()
{
    need(2);
    const std::uint16_t v = std::uint16_t(m_bytes[m_pos] | (m_bytes[m_pos + 1] << 8));
    m_pos += 2;
    return v;
}

std::uint32_t ByteReader::u32()
{
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= std::uint32_t(m_bytes[m_pos + i]) << (8 * i);
    m_pos += 4;
    return v;
}

float ByteReader::f32()
{
    return std::bit_cast<float>(u32());
}

std::span<const std::uint8_t> ByteReader::take(std::size_t count)
{
    need(count);
    auto s = m_bytes.subspan(m_pos, count);
    m_pos += count;
    return s;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out)
        throw Error("write failed: " + path.string());
}

} // namespace detail

std::vector<std::uint8_t> encode_tensor(const Tensor& t)
{
    std::vector<std::uint8_t> out{'E', 'V', 'R', 'T'};
    out.reserve(24 + 4 * t.size());
    detail::put_u32(out, kTensorFileVersion);
    const Shape& s = t.shape();
    for (std::uint32_t d : {s.n, s.c, s.h, s.w})
        detail::put_u32(out, d);
    for (float v : t.data())
        detail::put_f32(out, v);
    return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes)
{
    detail::ByteReader in(bytes);
    auto magic = in.take(4);
    if (!std::equal(magic.begin(), magic.end(), "EVRT"))
        throw FormatError("bad magic: not an EVRT tensor file");
    const std::uint32_t version = in.u32();
    if (version != kTensorFileVersion)
        throw FormatError("unsupported EVRT version " + std::to_string(version));
    Shape s{in.u32(), in.u32(), in.u32(), in.u32()};
    check_shape(s);
    if (in.remaining() != 4 * s.volume())
        throw FormatError("EVRT payload size " + std::to_string(in.remaining()) + " does not match dims " + to_string(s));
    std::vector<float> values(s.volume());
    for (float& v : values)
        v = in.f32();
    return Tensor(s, std::move(values));
}

void write_tensor(const Tensor& t, const std::filesystem::path& path)
{
    detail::write_file(path, encode_tensor(t));
}

Tensor read_tensor(const std::filesystem::path& path)
{
    return decode_tensor(detail::read_file(path));
}

} // namespace evr
