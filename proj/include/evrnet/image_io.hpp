#pragma once

#include "evrnet/tensor.hpp"

#include <filesystem>
#include <vector>

namespace evr {

/// Binary P6 PPM, maxval 255, decoded to a (1, 3, H, W) tensor in [0, 1] (v / 255).
Tensor read_ppm(const std::filesystem::path& path);
/// Encodes with round-half-up of v * 255 after clamping to [0, 1].
void write_ppm(const Tensor& image, const std::filesystem::path& path);

std::uint8_t to_byte(float v) noexcept;

/// .ppm or .evrt by extension.
Tensor read_frame(const std::filesystem::path& path);
void write_frame(const Tensor& frame, const std::filesystem::path& path);

/// Frame files (.ppm, .evrt) in a directory, sorted by filename.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// Reads every frame of a directory and checks that all share one shape.
std::vector<Tensor> read_sequence(const std::vector<std::filesystem::path>& files);

} // namespace evr
