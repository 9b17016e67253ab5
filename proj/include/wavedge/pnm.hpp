#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "wavedge/image.hpp"

namespace wavedge {

/// Binary graymap (P5) or pixmap (P6) with maxval 255.
struct PnmBytes {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;  // interleaved
};

PnmBytes decode_pnm(std::span<const std::uint8_t> file);
std::vector<std::uint8_t> encode_pnm(const PnmBytes& pnm);

PnmBytes read_pnm_bytes(const std::filesystem::path& path);
void write_pnm_bytes(const std::filesystem::path& path, const PnmBytes& pnm);

ImageD read_pnm(const std::filesystem::path& path);
/// P5 for one channel, P6 for three. Values are quantized with to_u8.
void write_pnm(const std::filesystem::path& path, const ImageD& img);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace wavedge
