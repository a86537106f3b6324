#include "evrnet/weights.hpp"

#include "evrnet/architecture.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

namespace evr {

void WeightStore::insert(std::string name, Tensor value)
{
    if (m_index.contains(name))
        throw Error("duplicate weight entry '" + name + "'");
    m_index.emplace(name, m_entries.size());
    m_entries.emplace_back(std::move(name), std::move(value));
}

const Tensor& WeightStore::at(const std::string& name) const
{
    auto it = m_index.find(name);
    if (it == m_index.end())
        throw Error("missing weight entry '" + name + "'");
    return m_entries[it->second].second;
}

Tensor& WeightStore::at(const std::string& name)
{
    return const_cast<Tensor&>(std::as_const(*this).at(name));
}

std::size_t WeightStore::total_elements() const noexcept
{
    std::size_t n = 0;
    for (const auto& [name, t] : m_entries)
        n += t.size();
    return n;
}

std::vector<std::string> WeightStore::validation_errors() const
{
    std::vector<std::string> errors;
    if (m_entries.empty())
    {
        errors.emplace_back("no entries");
        return errors;
    }
    std::vector<ParamEntry> manifest;
    try
    {
        manifest = weight_manifest(m_config);
    }
    catch (const ConfigError& e)
    {
        errors.emplace_back(std::string("invalid config: ") + e.what());
        return errors;
    }

    std::unordered_set<std::string> expected;
    for (const ParamEntry& e : manifest)
    {
        expected.insert(e.name);
        auto it = m_index.find(e.name);
        if (it == m_index.end())
            errors.push_back("missing entry '" + e.name + "'");
        else if (m_entries[it->second].second.shape() != e.shape)
            errors.push_back("entry '" + e.name + "' has shape " + to_string(m_entries[it->second].second.shape()) + ", expected "
                             + to_string(e.shape));
    }
    for (const auto& [name, t] : m_entries)
        if (!expected.contains(name))
            errors.push_back("unexpected entry '" + name + "'");
    return errors;
}

void WeightStore::validate() const
{
    const auto errors = validation_errors();
    if (errors.empty())
        return;
    std::string msg = "invalid weight store:";
    for (const auto& e : errors)
        msg += "\n  " + e;
    throw Error(msg);
}

bool WeightStore::operator==(const WeightStore& other) const
{
    return m_config == other.m_config && m_entries == other.m_entries;
}

std::vector<std::uint8_t> encode_weights(const WeightStore& store)
{
    if (store.empty())
        throw Error("cannot save weights: no entries");
    store.validate();

    const NetworkConfig& cfg = store.config();
    std::vector<std::uint8_t> out{'E', 'V', 'R', 'W'};
    out.reserve(64 + 4 * store.total_elements() + 64 * store.size());
    detail::put_u32(out, kWeightFileVersion);
    detail::put_u32(out, cfg.width);
    detail::put_u32(out, cfg.depths.alignment);
    detail::put_u32(out, cfg.depths.differential);
    detail::put_u32(out, cfg.depths.fusion);
    out.push_back(std::uint8_t(cfg.cu_variant));
    out.push_back(cfg.use_se ? 1 : 0);
    out.push_back(std::uint8_t(cfg.upsample));
    out.push_back(0);
    detail::put_u32(out, std::uint32_t(store.size()));
    for (const auto& [name, t] : store.entries())
    {
        if (name.size() > 0xFFFF)
            throw Error("weight name too long: " + name.substr(0, 32) + "...");
        detail::put_u16(out, std::uint16_t(name.size()));
        out.insert(out.end(), name.begin(), name.end());
        const Shape& s = t.shape();
        for (std::uint32_t d : {s.n, s.c, s.h, s.w})
            detail::put_u32(out, d);
        for (float v : t.data())
            detail::put_f32(out, v);
    }
    return out;
}

WeightStore decode_weights(std::span<const std::uint8_t> bytes)
{
    detail::ByteReader in(bytes);
    auto magic = in.take(4);
    if (!std::equal(magic.begin(), magic.end(), "EVRW"))
        throw FormatError("bad magic: not an EVRW weight file");
    const std::uint32_t version = in.u32();
    if (version != kWeightFileVersion)
        throw FormatError("version mismatch: file has EVRW version " + std::to_string(version) + ", expected "
                          + std::to_string(kWeightFileVersion));

    NetworkConfig cfg;
    cfg.width = in.u32();
    cfg.depths.alignment = in.u32();
    cfg.depths.differential = in.u32();
    cfg.depths.fusion = in.u32();
    const std::uint8_t variant = in.u8();
    const std::uint8_t use_se = in.u8();
    cfg.upsample = in.u8();
    in.u8(); // reserved
    if (variant > 1)
        throw FormatError("unknown cu_variant code " + std::to_string(variant));
    if (use_se > 1)
        throw FormatError("use_se flag must be 0 or 1, got " + std::to_string(use_se));
    cfg.cu_variant = CuVariant(variant);
    cfg.use_se = use_se == 1;

    WeightStore store(cfg);
    const std::uint32_t count = in.u32();
    for (std::uint32_t i = 0; i < count; ++i)
    {
        const std::uint16_t len = in.u16();
        auto name_bytes = in.take(len);
        std::string name(name_bytes.begin(), name_bytes.end());
        Shape s{in.u32(), in.u32(), in.u32(), in.u32()};
        if (s.n == 0 || s.c == 0 || s.h == 0 || s.w == 0)
            throw FormatError("entry '" + name + "' has a zero dimension " + to_string(s));
        if (in.remaining() / 4 < s.volume())
            throw FormatError("truncated file: payload of entry '" + name + "' is incomplete");
        std::vector<float> values(s.volume());
        for (float& v : values)
            v = in.f32();
        store.insert(std::move(name), Tensor(s, std::move(values)));
    }
    if (in.remaining() != 0)
        throw FormatError(std::to_string(in.remaining()) + " trailing bytes after last entry");
    store.validate();
    return store;
}

void save_weights(const WeightStore& store, const std::filesystem::path& path)
{
    detail::write_file(path, encode_weights(store));
}

WeightStore load_weights(const std::filesystem::path& path)
{
    return decode_weights(detail::read_file(path));
}

WeightStore load_weights(const std::filesystem::path& path, const NetworkConfig& expected)
{
    WeightStore store = load_weights(path);
    if (!(store.config() == expected))
        throw Error("weight file config (" + store.config().describe() + ") does not match expected config (" + expected.describe()
                    + ")");
    return store;
}

namespace {

std::string_view suffix(const std::string& name)
{
    return std::string_view(name).substr(name.rfind('.') + 1);
}

} // namespace

WeightStore init_random(const NetworkConfig& config, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    // 24 high bits -> [0, 1); std::uniform_real_distribution is not
    // reproducible across standard libraries
    auto uniform = [&rng] { return float(rng() >> 40) * 0x1.0p-24f; };

    WeightStore store(config);
    for (ParamEntry& e : weight_manifest(config))
    {
        Tensor t(e.shape);
        const std::string_view kind = suffix(e.name);
        if (kind == "slope")
            std::fill(t.data().begin(), t.data().end(), 0.25f);
        else if (kind == "weight")
        {
            const float fan_in = float(e.shape.c) * float(e.shape.h) * float(e.shape.w);
            const float bound = 1.0f / std::sqrt(fan_in);
            for (float& v : t.data())
                v = (2.0f * uniform() - 1.0f) * bound;
        }
        store.insert(std::move(e.name), std::move(t));
    }
    return store;
}

WeightStore init_constant(const NetworkConfig& config, float value)
{
    WeightStore store(config);
    for (ParamEntry& e : weight_manifest(config))
        store.insert(std::move(e.name), Tensor(e.shape, value));
    return store;
}

} // namespace evr
