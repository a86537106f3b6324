#pragma once

#include "evrnet/config.hpp"
#include "evrnet/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace evr {

/// Named learnable tensors plus the configuration they were built for.
/// Entries keep insertion order, which is the order they are serialized in.
class WeightStore
{
public:
    WeightStore() = default;
    explicit WeightStore(NetworkConfig config) : m_config(config) {}

    const NetworkConfig& config() const noexcept { return m_config; }

    /// Throws Error if the name already exists.
    void insert(std::string name, Tensor value);
    bool contains(const std::string& name) const { return m_index.contains(name); }
    /// Throws Error naming the missing entry.
    const Tensor& at(const std::string& name) const;
    Tensor& at(const std::string& name);

    std::size_t size() const noexcept { return m_entries.size(); }
    bool empty() const noexcept { return m_entries.empty(); }
    const std::vector<std::pair<std::string, Tensor>>& entries() const noexcept { return m_entries; }
    std::size_t total_elements() const noexcept;

    /// Problems with respect to the manifest of config(): missing, extra or
    /// mis-shaped entries. Empty when the store is valid.
    std::vector<std::string> validation_errors() const;
    /// Throws Error listing every problem found by validation_errors().
    void validate() const;

    bool operator==(const WeightStore& other) const;

private:
    NetworkConfig m_config{};
    std::vector<std::pair<std::string, Tensor>> m_entries;
    std::unordered_map<std::string, std::size_t> m_index;
};

// EVRW weight files, all integers little-endian:
//   "EVRW", u32 version,
//   u32 d, u32 N_A, u32 N_D, u32 N_F, u8 cu_variant, u8 use_se, u8 s, u8 reserved (0),
//   u32 entry count, then per entry:
//   u16 name length, UTF-8 name, u32 dims[4], float32 payload.
inline constexpr std::uint32_t kWeightFileVersion = 1;

std::vector<std::uint8_t> encode_weights(const WeightStore& store);
/// Parses and validates against the embedded config.
WeightStore decode_weights(std::span<const std::uint8_t> bytes);

void save_weights(const WeightStore& store, const std::filesystem::path& path);
/// Reads a file and trusts its embedded config.
WeightStore load_weights(const std::filesystem::path& path);
/// Reads a file and additionally requires the embedded config to equal `expected`.
WeightStore load_weights(const std::filesystem::path& path, const NetworkConfig& expected);

/// Deterministic initialisation: conv weights uniform in +-1/sqrt(fan_in),
/// biases zero, PReLU slopes 0.25. SE fully-connected layers follow the
/// conv rule with fan_in = their input width.
WeightStore init_random(const NetworkConfig& config, std::uint64_t seed);

/// Same layout, every tensor filled with `value` (PReLU slopes included).
WeightStore init_constant(const NetworkConfig& config, float value);

} // namespace evr
