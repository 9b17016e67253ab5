#pragma once

// Hand-built dataset files for reader/writer tests.

#include <array>
#include <filesystem>
#include <random>
#include <vector>

#include "wavedge/pnm.hpp"

namespace wavedge::testing {

struct IdxPaths {
  std::filesystem::path images;
  std::filesystem::path labels;
};

inline void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline std::vector<std::uint8_t> idx_image_bytes(std::uint32_t count, std::uint32_t rows,
                                                 std::uint32_t cols,
                                                 const std::vector<std::uint8_t>& pixels) {
  std::vector<std::uint8_t> out;
  append_be32(out, 0x00000803);
  append_be32(out, count);
  append_be32(out, rows);
  append_be32(out, cols);
  out.insert(out.end(), pixels.begin(), pixels.end());
  return out;
}

inline std::vector<std::uint8_t> idx_label_bytes(const std::vector<std::uint8_t>& labels) {
  std::vector<std::uint8_t> out;
  append_be32(out, 0x00000801);
  append_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

/// Two 3x2 images (3 columns, 2 rows) labelled 7 and 2.
inline const std::vector<std::uint8_t> kIdxFixturePixels = {0,   255, 128, 1,  2,  3,
                                                            200, 100, 50,  25, 12, 6};
inline const std::vector<std::uint8_t> kIdxFixtureLabels = {7, 2};

inline IdxPaths write_idx_fixture(const std::filesystem::path& dir) {
  IdxPaths p{dir / "fixture-images-idx3-ubyte", dir / "fixture-labels-idx1-ubyte"};
  write_file(p.images, idx_image_bytes(2, 2, 3, kIdxFixturePixels));
  write_file(p.labels, idx_label_bytes(kIdxFixtureLabels));
  return p;
}

/// `count` random CIFAR-10 records in one file.
inline std::vector<std::uint8_t> cifar_bytes(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<std::uint8_t> out;
  for (std::size_t r = 0; r < count; ++r) {
    out.push_back(static_cast<std::uint8_t>(byte(rng) % 10));
    for (int i = 0; i < 3072; ++i) out.push_back(static_cast<std::uint8_t>(byte(rng)));
  }
  return out;
}

inline std::vector<std::uint8_t> random_bytes(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(byte(rng));
  return out;
}

/// root/a (2 images), root/b (3 images), all `w` x `h` x `channels`.
inline void write_image_dir_fixture(const std::filesystem::path& root, int w = 4, int h = 3,
                                    int channels = 1) {
  std::mt19937_64 rng(17);
  const std::array<std::pair<const char*, int>, 2> classes{{{"a", 2}, {"b", 3}}};
  for (const auto& [name, n] : classes) {
    std::filesystem::create_directories(root / name);
    for (int i = 0; i < n; ++i) {
      PnmBytes pnm{w, h, channels, random_bytes(static_cast<std::size_t>(w * h * channels), rng)};
      write_pnm_bytes(root / name / ("img" + std::to_string(i) + (channels == 1 ? ".pgm" : ".ppm")),
                      pnm);
    }
  }
}

}  // namespace wavedge::testing
