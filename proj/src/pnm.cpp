#include "wavedge/pnm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "wavedge/errors.hpp"

namespace wavedge {

namespace {

class HeaderScanner {
 public:
  explicit HeaderScanner(std::span<const std::uint8_t> data) : data_(data) {}

  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(data_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  int read_int() {
    skip_space_and_comments();
    if (pos_ >= data_.size() || !std::isdigit(data_[pos_])) {
      throw FormatError("pnm: malformed header");
    }
    long v = 0;
    while (pos_ < data_.size() && std::isdigit(data_[pos_])) {
      v = v * 10 + (data_[pos_++] - '0');
      if (v > (1L << 24)) throw FormatError("pnm: header value too large");
    }
    return static_cast<int>(v);
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace

PnmBytes decode_pnm(std::span<const std::uint8_t> file) {
  if (file.size() < 2 || file[0] != 'P' || (file[1] != '5' && file[1] != '6')) {
    throw FormatError("pnm: only binary P5/P6 files are supported");
  }
  PnmBytes out;
  out.channels = file[1] == '5' ? 1 : 3;
  HeaderScanner scan(file);
  scan.advance(2);
  out.width = scan.read_int();
  out.height = scan.read_int();
  const int maxval = scan.read_int();
  if (out.width < 1 || out.height < 1) throw FormatError("pnm: empty image");
  if (maxval != 255) throw FormatError("pnm: maxval must be 255, got " + std::to_string(maxval));
  // Exactly one whitespace byte separates the header from the raster.
  if (scan.pos() >= file.size() || !std::isspace(file[scan.pos()])) {
    throw FormatError("pnm: malformed header");
  }
  scan.advance(1);
  const std::size_t n = static_cast<std::size_t>(out.width) * out.height * out.channels;
  if (file.size() - scan.pos() < n) throw FormatError("pnm: truncated raster");
  out.pixels.assign(file.begin() + static_cast<std::ptrdiff_t>(scan.pos()),
                    file.begin() + static_cast<std::ptrdiff_t>(scan.pos() + n));
  return out;
}

std::vector<std::uint8_t> encode_pnm(const PnmBytes& pnm) {
  const std::string header = std::string(pnm.channels == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(pnm.width) + " " + std::to_string(pnm.height) +
                             "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), pnm.pixels.begin(), pnm.pixels.end());
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

PnmBytes read_pnm_bytes(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_pnm(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_pnm_bytes(const std::filesystem::path& path, const PnmBytes& pnm) {
  write_file(path, encode_pnm(pnm));
}

ImageD read_pnm(const std::filesystem::path& path) {
  const PnmBytes pnm = read_pnm_bytes(path);
  return from_u8<double>(pnm.pixels, pnm.width, pnm.height, pnm.channels);
}

void write_pnm(const std::filesystem::path& path, const ImageD& img) {
  write_pnm_bytes(path, {img.width(), img.height(), img.channels(), to_u8(img)});
}

}  // namespace wavedge
