#include "wavedge/coeff_dump.hpp"

#include <bit>
#include <cstring>
#include <json.hpp>

#include "wavedge/errors.hpp"
#include "wavedge/pnm.hpp"

namespace wavedge {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t at, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= std::uint64_t{bytes[at + i]} << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_wvq(const Plane<double>& plane) {
  std::vector<std::uint8_t> out{'W', 'V', 'Q', '1'};
  out.reserve(12 + 8 * static_cast<std::size_t>(plane.size()));
  put_u32(out, static_cast<std::uint32_t>(plane.cols()));
  put_u32(out, static_cast<std::uint32_t>(plane.rows()));
  for (Eigen::Index i = 0; i < plane.size(); ++i) put_f64(out, plane.data()[i]);
  return out;
}

Plane<double> decode_wvq(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "WVQ1", 4) != 0) {
    throw FormatError("wvq: bad magic");
  }
  const auto width = static_cast<Eigen::Index>(get_le(bytes, 4, 4));
  const auto height = static_cast<Eigen::Index>(get_le(bytes, 8, 4));
  if (bytes.size() != 12 + 8 * static_cast<std::size_t>(width * height)) {
    throw FormatError("wvq: payload size does not match header");
  }
  Plane<double> plane(height, width);
  for (Eigen::Index i = 0; i < plane.size(); ++i) {
    plane.data()[i] = std::bit_cast<double>(get_le(bytes, 12 + 8 * static_cast<std::size_t>(i), 8));
  }
  return plane;
}

std::vector<SubbandEnergy> dump_pyramids(const std::vector<CoeffPyramid<double>>& pyramids,
                                         const std::filesystem::path& dir) {
  std::vector<SubbandEnergy> energies;
  nlohmann::json sidecar;
  if (!pyramids.empty()) {
    sidecar["width"] = pyramids.front().width;
    sidecar["height"] = pyramids.front().height;
    sidecar["levels"] = pyramids.front().depth();
  }
  sidecar["channels"] = pyramids.size();
  sidecar["magic"] = "WVQ1";
  sidecar["subbands"] = nlohmann::json::array();

  if (!dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  }

  auto emit = [&](int channel, int level, const char* band, const Plane<double>& p) {
    SubbandEnergy e{channel, level, band, p.squaredNorm(), {}};
    if (!dir.empty()) {
      e.file = "c" + std::to_string(channel) + "_L" + std::to_string(level) + "_" + band + ".wvq";
      write_file(dir / e.file, encode_wvq(p));
    }
    sidecar["subbands"].push_back({{"channel", channel},
                                   {"level", level},
                                   {"band", band},
                                   {"width", p.cols()},
                                   {"height", p.rows()},
                                   {"energy", e.energy},
                                   {"file", e.file.string()}});
    energies.push_back(std::move(e));
  };

  for (std::size_t c = 0; c < pyramids.size(); ++c) {
    const auto& pyr = pyramids[c];
    const int ch = static_cast<int>(c);
    for (int j = 0; j < pyr.depth(); ++j) {
      const auto& d = pyr.levels[static_cast<std::size_t>(j)];
      emit(ch, j + 1, "LH", d.horiz);
      emit(ch, j + 1, "HL", d.vert);
      emit(ch, j + 1, "HH", d.diag);
    }
    emit(ch, pyr.depth(), "LL", pyr.coarsest_approx);
  }

  if (!dir.empty()) {
    const std::string text = sidecar.dump(2) + "\n";
    write_file(dir / "decomposition.json",
               std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }
  return energies;
}

}  // namespace wavedge
