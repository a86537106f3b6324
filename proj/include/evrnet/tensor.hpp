#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evr {

struct Error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Raised whenever operand dimensions do not satisfy an operation's contract.
struct ShapeError : Error
{
    using Error::Error;
};

/// Raised for malformed or truncated files.
struct FormatError : Error
{
    using Error::Error;
};

struct Shape
{
    std::uint32_t n = 1;
    std::uint32_t c = 1;
    std::uint32_t h = 1;
    std::uint32_t w = 1;

    std::size_t volume() const noexcept { return std::size_t(n) * c * h * w; }
    std::size_t plane() const noexcept { return std::size_t(h) * w; }
    bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& s);

/// Dense rank-4 single-precision tensor in n-c-h-w order.
///
/// All dims are at least one and the buffer always holds exactly
/// `shape().volume()` elements. Operations in this library never mutate
/// their inputs; mutable access exists so callers can fill a freshly
/// constructed tensor.
class Tensor
{
public:
    Tensor() = default;
    explicit Tensor(Shape shape, float fill = 0.0f);
    Tensor(Shape shape, std::vector<float> values);

    const Shape& shape() const noexcept { return m_shape; }
    std::size_t size() const noexcept { return m_data.size(); }
    bool empty() const noexcept { return m_data.empty(); }

    std::span<const float> data() const noexcept { return m_data; }
    std::span<float> data() noexcept { return m_data; }

    std::size_t index(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const noexcept
    {
        return ((n * m_shape.c + c) * m_shape.h + y) * m_shape.w + x;
    }
    float at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const noexcept { return m_data[index(n, c, y, x)]; }
    float& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) noexcept { return m_data[index(n, c, y, x)]; }

    /// One (h, w) plane.
    std::span<const float> plane(std::size_t n, std::size_t c) const noexcept
    {
        return std::span<const float>(m_data).subspan(index(n, c, 0, 0), m_shape.plane());
    }
    std::span<float> plane(std::size_t n, std::size_t c) noexcept
    {
        return std::span<float>(m_data).subspan(index(n, c, 0, 0), m_shape.plane());
    }

    bool operator==(const Tensor& other) const noexcept;

private:
    Shape m_shape{};
    std::vector<float> m_data;
};

void check_shape(const Shape& s);

/// Channels of `a` followed by channels of `b`.
Tensor concat_channels(const Tensor& a, const Tensor& b);
Tensor slice_channels(const Tensor& x, std::uint32_t first, std::uint32_t count);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);

bool all_finite(const Tensor& t) noexcept;
float max_abs_diff(const Tensor& a, const Tensor& b);

// Raw ".evrt" tensor files: "EVRT", u32 version, u32 n/c/h/w, LE float32 payload.
inline constexpr std::uint32_t kTensorFileVersion = 1;

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);
void write_tensor(const Tensor& t, const std::filesystem::path& path);
Tensor read_tensor(const std::filesystem::path& path);

namespace detail {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v);
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_f32(std::vector<std::uint8_t>& out, float v);

/// Little-endian cursor over a byte buffer; throws FormatError on overrun.
class ByteReader
{
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : m_bytes(bytes) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    float f32();
    std::span<const std::uint8_t> take(std::size_t count);
    std::size_t remaining() const noexcept { return m_bytes.size() - m_pos; }

private:
    void need(std::size_t count) const;

    std::span<const std::uint8_t> m_bytes;
    std::size_t m_pos = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace detail
} // namespace evr
