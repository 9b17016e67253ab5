#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "wavedge/errors.hpp"
#include "wavedge/image.hpp"

namespace wavedge {

/// Odd-length, centered 1D filter.
template <typename Scalar = double>
class Kernel1D {
 public:
  explicit Kernel1D(std::vector<Scalar> taps) : taps_(std::move(taps)) {
    require(!taps_.empty() && taps_.size() % 2 == 1, "Kernel1D: length must be odd and >= 1");
  }

  int radius() const { return static_cast<int>(taps_.size() / 2); }
  std::size_t size() const { return taps_.size(); }
  /// Weight at signed offset k in [-radius, radius].
  Scalar at(int k) const { return taps_[static_cast<std::size_t>(k + radius())]; }
  const std::vector<Scalar>& taps() const { return taps_; }

  Scalar sum() const {
    Scalar s = 0;
    for (Scalar t : taps_) s += t;
    return s;
  }

 private:
  std::vector<Scalar> taps_;
};

/// Sampled exp(-k^2 / 2 sigma^2) on k in [-ceil(3 sigma), ceil(3 sigma)], renormalized to sum 1.
template <typename Scalar = double>
Kernel1D<Scalar> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("gaussian sigma must be > 0, got " + std::to_string(sigma));
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> raw(2 * static_cast<std::size_t>(radius) + 1);
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double w = std::exp(-(double(k) * k) / (2.0 * sigma * sigma));
    raw[static_cast<std::size_t>(k + radius)] = w;
    total += w;
  }
  std::vector<Scalar> taps(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) taps[i] = static_cast<Scalar>(raw[i] / total);
  return Kernel1D<Scalar>(std::move(taps));
}

/// Convolves along each row (x direction), replicating edge samples.
template <typename Scalar>
Plane<Scalar> convolve_rows(const Plane<Scalar>& in, const Kernel1D<Scalar>& kernel) {
  const Eigen::Index rows = in.rows();
  const Eigen::Index cols = in.cols();
  const int r = kernel.radius();
  Plane<Scalar> out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      Scalar acc = 0;
      for (int k = -r; k <= r; ++k) {
        const Eigen::Index xs = std::clamp<Eigen::Index>(x + k, 0, cols - 1);
        acc += kernel.at(k) * in(y, xs);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

/// Convolves along each column (y direction), replicating edge samples.
template <typename Scalar>
Plane<Scalar> convolve_cols(const Plane<Scalar>& in, const Kernel1D<Scalar>& kernel) {
  const Eigen::Index rows = in.rows();
  const Eigen::Index cols = in.cols();
  const int r = kernel.radius();
  Plane<Scalar> out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      Scalar acc = 0;
      for (int k = -r; k <= r; ++k) {
        const Eigen::Index ys = std::clamp<Eigen::Index>(y + k, 0, rows - 1);
        acc += kernel.at(k) * in(ys, x);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

template <typename Derived>
Plane<typename Derived::Scalar> gaussian_smooth(const Eigen::MatrixBase<Derived>& plane,
                                                double sigma) {
  using Scalar = typename Derived::Scalar;
  const auto kernel = gaussian_kernel<Scalar>(sigma);
  return convolve_cols(convolve_rows(Plane<Scalar>(plane), kernel), kernel);
}

/// Separable Gaussian blur of every channel; output has the input's shape.
template <typename Scalar>
Image<Scalar> gaussian_smooth(const Image<Scalar>& img, double sigma) {
  const auto kernel = gaussian_kernel<Scalar>(sigma);
  return img.map_planes([&](const Plane<Scalar>& p) {
    return convolve_cols(convolve_rows(p, kernel), kernel);
  });
}

}  // namespace wavedge
