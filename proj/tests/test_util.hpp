#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "wavedge/image.hpp"

namespace wavedge::testing {

inline Plane<double> random_plane(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                                  double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Plane<double> p(rows, cols);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = dist(rng);
  return p;
}

inline ImageD random_image(std::mt19937_64& rng, int width, int height, int channels) {
  std::vector<Plane<double>> planes;
  for (int c = 0; c < channels; ++c) planes.push_back(random_plane(rng, height, width));
  return ImageD(std::move(planes));
}

inline double max_abs_diff(const Plane<double>& a, const Plane<double>& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const ImageD& a, const ImageD& b) {
  double m = 0.0;
  for (int c = 0; c < a.channels(); ++c) m = std::max(m, max_abs_diff(a.plane(c), b.plane(c)));
  return m;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("wavedge_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace wavedge::testing
