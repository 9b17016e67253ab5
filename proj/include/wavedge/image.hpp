#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wavedge/errors.hpp"

namespace wavedge {

/// A single channel plane: rows are image rows (y), columns are image columns (x).
template <typename Scalar>
using Plane = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Byte order of packed 8-bit pixels. PNM files and most decoders are
/// interleaved; CIFAR-10 records are planar.
enum class PixelLayout { Interleaved, Planar };

/// Real-valued image stored as one plane per channel, nominal range [0, 1].
template <typename Scalar = double>
class Image {
 public:
  using PlaneType = Plane<Scalar>;

  Image() = default;

  Image(int width, int height, int channels, Scalar fill = Scalar(0)) {
    check_shape(width, height, channels);
    planes_.assign(static_cast<std::size_t>(channels), PlaneType::Constant(height, width, fill));
  }

  explicit Image(std::vector<PlaneType> planes) : planes_(std::move(planes)) {
    require(!planes_.empty(), "Image: at least one plane required");
    check_shape(width(), height(), channels());
    for (const auto& p : planes_) {
      require(p.rows() == height() && p.cols() == width(), "Image: planes differ in shape");
    }
  }

  static Image from_plane(PlaneType plane) {
    std::vector<PlaneType> planes;
    planes.push_back(std::move(plane));
    return Image(std::move(planes));
  }

  int width() const { return planes_.empty() ? 0 : static_cast<int>(planes_.front().cols()); }
  int height() const { return planes_.empty() ? 0 : static_cast<int>(planes_.front().rows()); }
  int channels() const { return static_cast<int>(planes_.size()); }
  std::size_t size() const {
    return static_cast<std::size_t>(width()) * height() * channels();
  }

  const PlaneType& plane(int c) const { return planes_.at(static_cast<std::size_t>(c)); }
  PlaneType& plane(int c) { return planes_.at(static_cast<std::size_t>(c)); }
  const std::vector<PlaneType>& planes() const { return planes_; }

  Scalar operator()(int x, int y, int c = 0) const { return plane(c)(y, x); }
  Scalar& operator()(int x, int y, int c = 0) { return plane(c)(y, x); }

  bool all_finite() const {
    return std::all_of(planes_.begin(), planes_.end(),
                       [](const PlaneType& p) { return p.allFinite(); });
  }

  /// Applies `fn(plane) -> plane` to every channel.
  template <typename Fn>
  Image map_planes(Fn&& fn) const {
    std::vector<PlaneType> out;
    out.reserve(planes_.size());
    for (const auto& p : planes_) out.push_back(fn(p));
    return Image(std::move(out));
  }

  friend bool operator==(const Image& a, const Image& b) {
    if (a.channels() != b.channels() || a.width() != b.width() || a.height() != b.height()) {
      return false;
    }
    for (int c = 0; c < a.channels(); ++c) {
      if (a.plane(c) != b.plane(c)) return false;
    }
    return true;
  }

 private:
  static void check_shape(int width, int height, int channels) {
    require(width >= 1 && height >= 1, "Image: width and height must be >= 1");
    require(channels == 1 || channels == 3, "Image: channels must be 1 or 3");
  }

  std::vector<PlaneType> planes_;
};

using ImageD = Image<double>;

/// Each byte b becomes b / 255.
template <typename Scalar = double>
Image<Scalar> from_u8(std::span<const std::uint8_t> bytes, int width, int height, int channels,
                      PixelLayout layout = PixelLayout::Interleaved) {
  if (width < 1 || height < 1 || (channels != 1 && channels != 3)) {
    throw FormatError("from_u8: bad image shape " + std::to_string(width) + "x" +
                      std::to_string(height) + "x" + std::to_string(channels));
  }
  const std::size_t expected = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() != expected) {
    throw FormatError("from_u8: expected " + std::to_string(expected) + " bytes, got " +
                      std::to_string(bytes.size()));
  }
  Image<Scalar> img(width, height, channels);
  const std::size_t plane_size = static_cast<std::size_t>(width) * height;
  for (int c = 0; c < channels; ++c) {
    auto& p = img.plane(c);
    for (std::size_t i = 0; i < plane_size; ++i) {
      const std::size_t src = layout == PixelLayout::Planar ? c * plane_size + i
                                                            : i * channels + c;
      p.data()[i] = static_cast<Scalar>(bytes[src]) / Scalar(255);
    }
  }
  return img;
}

/// Quantizes one value: clamp to [0, 1], scale by 255, round half up.
template <typename Scalar>
std::uint8_t quantize_u8(Scalar v) {
  const double clamped = std::clamp(static_cast<double>(v), 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(clamped * 255.0 + 0.5));
}

template <typename Scalar>
std::vector<std::uint8_t> to_u8(const Image<Scalar>& img,
                                PixelLayout layout = PixelLayout::Interleaved) {
  const int channels = img.channels();
  const std::size_t plane_size = static_cast<std::size_t>(img.width()) * img.height();
  std::vector<std::uint8_t> out(plane_size * channels);
  for (int c = 0; c < channels; ++c) {
    const auto& p = img.plane(c);
    for (std::size_t i = 0; i < plane_size; ++i) {
      const std::size_t dst = layout == PixelLayout::Planar ? c * plane_size + i
                                                            : i * channels + c;
      out[dst] = quantize_u8(p.data()[i]);
    }
  }
  return out;
}

/// Affinely maps [min, max] over all channels onto [0, 1]. A flat image maps to zeros.
template <typename Scalar>
Image<Scalar> rescale_unit(const Image<Scalar>& img) {
  Scalar lo = img.plane(0).minCoeff();
  Scalar hi = img.plane(0).maxCoeff();
  for (int c = 1; c < img.channels(); ++c) {
    lo = std::min(lo, img.plane(c).minCoeff());
    hi = std::max(hi, img.plane(c).maxCoeff());
  }
  const Scalar range = hi - lo;
  return img.map_planes([&](const Plane<Scalar>& p) -> Plane<Scalar> {
    if (!(range > Scalar(0))) return Plane<Scalar>::Zero(p.rows(), p.cols());
    return ((p.array() - lo) / range).matrix();
  });
}

template <typename Scalar>
Image<Scalar> clamp_unit(const Image<Scalar>& img) {
  return img.map_planes([](const Plane<Scalar>& p) -> Plane<Scalar> {
    return p.cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
  });
}

}  // namespace wavedge
