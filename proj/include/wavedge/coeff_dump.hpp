#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wavedge/dwt.hpp"

namespace wavedge {

/// WVQ1 subband file: "WVQ1", u32 LE width, u32 LE height, then f64 LE values row-major.
std::vector<std::uint8_t> encode_wvq(const Plane<double>& plane);
Plane<double> decode_wvq(std::span<const std::uint8_t> bytes);

struct SubbandEnergy {
  int channel = 0;
  int level = 0;     // 1 = finest
  std::string band;  // "LL", "LH", "HL", "HH"
  double energy = 0.0;
  std::filesystem::path file;
};

/// Writes one WVQ1 file per subband plus `decomposition.json`; returns per-subband energies.
/// Passing an empty `dir` only computes the energies.
std::vector<SubbandEnergy> dump_pyramids(const std::vector<CoeffPyramid<double>>& pyramids,
                                         const std::filesystem::path& dir);

}  // namespace wavedge
