#pragma once

// Straight-line transcription of the four-case suppression rule on the raw angle in (-pi, pi],
// with the symmetric +-pi/8 sectors. Indices: i is the column (x), j the row (y).

#include <numbers>

#include "wavedge/image.hpp"

namespace wavedge::testing {

inline bool in_range(double a, double lo, double hi) { return a >= lo && a <= hi; }

inline Plane<double> nms_bruteforce(const Plane<double>& m, const Plane<double>& angle) {
  constexpr double pi = std::numbers::pi;
  constexpr double e = pi / 8;
  Plane<double> lm = Plane<double>::Zero(m.rows(), m.cols());
  auto M = [&](Eigen::Index i, Eigen::Index j) { return m(j, i); };
  for (Eigen::Index i = 1; i + 1 < m.cols(); ++i) {
    for (Eigen::Index j = 1; j + 1 < m.rows(); ++j) {
      const double a = angle(j, i);
      if (in_range(a, -e, e) || in_range(a, pi - e, pi) || in_range(a, -pi, -pi + e)) {
        if (M(i, j) > M(i + 1, j) && M(i, j) > M(i - 1, j)) lm(j, i) = M(i, j);
      } else if (in_range(a, pi / 2 - e, pi / 2 + e) || in_range(a, -pi / 2 - e, -pi / 2 + e)) {
        if (M(i, j) > M(i, j + 1) && M(i, j) > M(i, j - 1)) lm(j, i) = M(i, j);
      } else if (in_range(a, pi / 4 - e, pi / 4 + e) ||
                 in_range(a, -3 * pi / 4 - e, -3 * pi / 4 + e)) {
        if (M(i, j) > M(i + 1, j + 1) && M(i, j) > M(i - 1, j - 1)) lm(j, i) = M(i, j);
      } else {
        if (M(i, j) > M(i + 1, j - 1) && M(i, j) > M(i - 1, j + 1)) lm(j, i) = M(i, j);
      }
    }
  }
  return lm;
}

}  // namespace wavedge::testing
