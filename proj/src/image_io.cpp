#include "evrnet/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace evr {

namespace {

// Header token reader that skips whitespace and '#' comments.
class PpmHeader
{
public:
    explicit PpmHeader(std::span<const std::uint8_t> bytes) : m_bytes(bytes) {}

    std::string token()
    {
        skip();
        std::string t;
        while (m_pos < m_bytes.size() && !std::isspace(m_bytes[m_pos]))
            t.push_back(char(m_bytes[m_pos++]));
        if (t.empty())
            throw FormatError("PPM: truncated header");
        return t;
    }

    unsigned number()
    {
        const std::string t = token();
        if (!std::all_of(t.begin(), t.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
            throw FormatError("PPM: expected a number in header, got '" + t + "'");
        return unsigned(std::stoul(t));
    }

    /// Position of the first raster byte (exactly one whitespace after maxval).
    std::size_t raster_start()
    {
        if (m_pos >= m_bytes.size() || !std::isspace(m_bytes[m_pos]))
            throw FormatError("PPM: missing whitespace before raster");
        return m_pos + 1;
    }

private:
    void skip()
    {
        while (m_pos < m_bytes.size())
        {
            if (std::isspace(m_bytes[m_pos]))
                ++m_pos;
            else if (m_bytes[m_pos] == '#')
                while (m_pos < m_bytes.size() && m_bytes[m_pos] != '\n')
                    ++m_pos;
            else
                break;
        }
    }

    std::span<const std::uint8_t> m_bytes;
    std::size_t m_pos = 0;
};

} // namespace

std::uint8_t to_byte(float v) noexcept
{
    const float c = std::clamp(v, 0.0f, 1.0f);
    return std::uint8_t(std::floor(double(c) * 255.0 + 0.5));
}

Tensor read_ppm(const std::filesystem::path& path)
{
    const auto bytes = detail::read_file(path);
    PpmHeader header(bytes);
    if (header.token() != "P6")
        throw FormatError(path.string() + ": not a binary P6 PPM");
    const unsigned w = header.number(), h = header.number(), maxval = header.number();
    if (w == 0 || h == 0)
        throw FormatError(path.string() + ": zero image size");
    if (maxval != 255)
        throw FormatError(path.string() + ": only 8-bit PPM (maxval 255) is supported");
    const std::size_t start = header.raster_start();
    const std::size_t need = std::size_t(w) * h * 3;
    if (bytes.size() < start + need)
        throw FormatError(path.string() + ": truncated raster");

    Tensor t(Shape{1, 3, h, w});
    for (std::size_t p = 0; p < std::size_t(w) * h; ++p)
        for (std::uint32_t c = 0; c < 3; ++c)
            t.plane(0, c)[p] = float(bytes[start + 3 * p + c]) / 255.0f;
    return t;
}

void write_ppm(const Tensor& image, const std::filesystem::path& path)
{
    const Shape& s = image.shape();
    if (s.n != 1 || s.c != 3)
        throw ShapeError("write_ppm: expected (1,3,H,W), got " + to_string(s));
    const std::string header = "P6\n" + std::to_string(s.w) + " " + std::to_string(s.h) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(header.size() + 3 * s.plane());
    for (std::size_t p = 0; p < s.plane(); ++p)
        for (std::uint32_t c = 0; c < 3; ++c)
            out.push_back(to_byte(image.plane(0, c)[p]));
    detail::write_file(path, out);
}

Tensor read_frame(const std::filesystem::path& path)
{
    const auto ext = path.extension();
    if (ext == ".ppm")
        return read_ppm(path);
    if (ext == ".evrt")
        return read_tensor(path);
    throw FormatError(path.string() + ": unsupported frame format (expected .ppm or .evrt)");
}

void write_frame(const Tensor& frame, const std::filesystem::path& path)
{
    const auto ext = path.extension();
    if (ext == ".ppm")
        write_ppm(frame, path);
    else if (ext == ".evrt")
        write_tensor(frame, path);
    else
        throw FormatError(path.string() + ": unsupported frame format (expected .ppm or .evrt)");
}

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir))
        throw Error("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
    {
        if (!entry.is_regular_file())
            continue;
        const auto ext = entry.path().extension();
        if (ext == ".ppm" || ext == ".evrt")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
    return files;
}

std::vector<Tensor> read_sequence(const std::vector<std::filesystem::path>& files)
{
    if (files.empty())
        throw Error("empty frame sequence");
    std::vector<Tensor> frames;
    frames.reserve(files.size());
    for (std::size_t i = 0; i < files.size(); ++i)
    {
        frames.push_back(read_frame(files[i]));
        if (frames.back().shape() != frames.front().shape())
            throw ShapeError("frame " + std::to_string(i) + " (" + files[i].filename().string() + ") has shape "
                             + to_string(frames.back().shape()) + ", expected " + to_string(frames.front().shape()));
    }
    return frames;
}

} // namespace evr
