#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <string>
#include <vector>

#include "wavedge/errors.hpp"
#include "wavedge/image.hpp"

namespace wavedge {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
inline constexpr Scalar kInvSqrt2 = Scalar(1) / std::numbers::sqrt2_v<Scalar>;

template <typename Scalar>
struct HaarBands1D {
  Vector<Scalar> approx;
  Vector<Scalar> detail;
};

/// One orthonormal Haar analysis step over sample pairs (x[2k], x[2k+1]).
template <typename Derived>
HaarBands1D<typename Derived::Scalar> haar_fwd_1d(const Eigen::MatrixBase<Derived>& signal) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = signal.size();
  require(n >= 2 && n % 2 == 0, "haar_fwd_1d: length must be even and >= 2, got " +
                                     std::to_string(n));
  const auto even = signal(Eigen::seqN(0, n / 2, 2));
  const auto odd = signal(Eigen::seqN(1, n / 2, 2));
  return {(even + odd) * kInvSqrt2<Scalar>, (even - odd) * kInvSqrt2<Scalar>};
}

template <typename DerivedA, typename DerivedD>
Vector<typename DerivedA::Scalar> haar_inv_1d(const Eigen::MatrixBase<DerivedA>& approx,
                                              const Eigen::MatrixBase<DerivedD>& detail) {
  using Scalar = typename DerivedA::Scalar;
  require(approx.size() == detail.size(), "haar_inv_1d: approx/detail length mismatch");
  const Eigen::Index half = approx.size();
  Vector<Scalar> out(2 * half);
  out(Eigen::seqN(0, half, 2)) = (approx + detail) * kInvSqrt2<Scalar>;
  out(Eigen::seqN(1, half, 2)) = (approx - detail) * kInvSqrt2<Scalar>;
  return out;
}

/// Subbands of one 2D level. Naming follows the (row filter, column filter) pair:
///   approx = LL, horiz = LH (low along x, high along y; responds to horizontal edges),
///   vert = HL (high along x, low along y; responds to vertical edges), diag = HH.
/// `vert` is therefore the x-derivative field and `horiz` the y-derivative field.
template <typename Scalar>
struct CoeffQuad {
  Plane<Scalar> approx;
  Plane<Scalar> horiz;
  Plane<Scalar> vert;
  Plane<Scalar> diag;

  Eigen::Index rows() const { return approx.rows(); }
  Eigen::Index cols() const { return approx.cols(); }

  bool consistent() const {
    auto same = [&](const Plane<Scalar>& p) { return p.rows() == rows() && p.cols() == cols(); };
    return same(horiz) && same(vert) && same(diag);
  }
};

/// Subband length for a signal of length n: odd lengths gain one padded sample.
constexpr Eigen::Index half_length(Eigen::Index n) { return (n + 1) / 2; }

/// Appends a mirrored copy of the last row/column when that dimension is odd.
template <typename Scalar>
Plane<Scalar> pad_to_even(const Plane<Scalar>& plane) {
  const Eigen::Index rows = plane.rows() + plane.rows() % 2;
  const Eigen::Index cols = plane.cols() + plane.cols() % 2;
  if (rows == plane.rows() && cols == plane.cols()) return plane;
  Plane<Scalar> out(rows, cols);
  out.topLeftCorner(plane.rows(), plane.cols()) = plane;
  if (cols != plane.cols()) {
    out.col(cols - 1).head(plane.rows()) = plane.col(plane.cols() - 1);
  }
  if (rows != plane.rows()) out.row(rows - 1) = out.row(rows - 2);
  return out;
}

/// Single-level separable Haar DWT: rows first, then columns of each half.
template <typename Derived>
CoeffQuad<typename Derived::Scalar> dwt2_level(const Eigen::MatrixBase<Derived>& plane) {
  using Scalar = typename Derived::Scalar;
  require(plane.rows() >= 2 && plane.cols() >= 2,
          "dwt2_level: plane must be at least 2x2, got " + std::to_string(plane.cols()) + "x" +
              std::to_string(plane.rows()));
  const Plane<Scalar> x = pad_to_even(Plane<Scalar>(plane));
  const Eigen::Index hr = x.rows() / 2;
  const Eigen::Index hc = x.cols() / 2;
  const auto all = Eigen::all;
  const auto s = kInvSqrt2<Scalar>;

  // Row pass: pairs along x.
  const Plane<Scalar> low_x = (x(all, Eigen::seqN(0, hc, 2)) + x(all, Eigen::seqN(1, hc, 2))) * s;
  const Plane<Scalar> high_x = (x(all, Eigen::seqN(0, hc, 2)) - x(all, Eigen::seqN(1, hc, 2))) * s;

  // Column pass: pairs along y.
  const auto top = Eigen::seqN(0, hr, 2);
  const auto bottom = Eigen::seqN(1, hr, 2);
  CoeffQuad<Scalar> q;
  q.approx = (low_x(top, all) + low_x(bottom, all)) * s;
  q.horiz = (low_x(top, all) - low_x(bottom, all)) * s;
  q.vert = (high_x(top, all) + high_x(bottom, all)) * s;
  q.diag = (high_x(top, all) - high_x(bottom, all)) * s;
  return q;
}

/// Exact inverse of dwt2_level; strips the padded row/column for odd targets.
template <typename Scalar>
Plane<Scalar> idwt2_level(const CoeffQuad<Scalar>& q, Eigen::Index target_rows,
                          Eigen::Index target_cols) {
  require(q.consistent(), "idwt2_level: subbands differ in shape");
  require(target_rows >= 1 && target_cols >= 1 && half_length(target_rows) == q.rows() &&
              half_length(target_cols) == q.cols(),
          "idwt2_level: target shape " + std::to_string(target_cols) + "x" +
              std::to_string(target_rows) + " inconsistent with subbands " +
              std::to_string(q.cols()) + "x" + std::to_string(q.rows()));
  const Eigen::Index hr = q.rows();
  const Eigen::Index hc = q.cols();
  const auto all = Eigen::all;
  const auto s = kInvSqrt2<Scalar>;

  Plane<Scalar> low_x(2 * hr, hc);
  Plane<Scalar> high_x(2 * hr, hc);
  low_x(Eigen::seqN(0, hr, 2), all) = (q.approx + q.horiz) * s;
  low_x(Eigen::seqN(1, hr, 2), all) = (q.approx - q.horiz) * s;
  high_x(Eigen::seqN(0, hr, 2), all) = (q.vert + q.diag) * s;
  high_x(Eigen::seqN(1, hr, 2), all) = (q.vert - q.diag) * s;

  Plane<Scalar> x(2 * hr, 2 * hc);
  x(all, Eigen::seqN(0, hc, 2)) = (low_x + high_x) * s;
  x(all, Eigen::seqN(1, hc, 2)) = (low_x - high_x) * s;
  return x.topLeftCorner(target_rows, target_cols);
}

template <typename Scalar>
struct DetailTriple {
  Plane<Scalar> horiz;
  Plane<Scalar> vert;
  Plane<Scalar> diag;
};

/// J-level decomposition of one plane. `levels[0]` is the finest level.
template <typename Scalar>
struct CoeffPyramid {
  std::vector<DetailTriple<Scalar>> levels;
  Plane<Scalar> coarsest_approx;
  Eigen::Index width = 0;
  Eigen::Index height = 0;

  int depth() const { return static_cast<int>(levels.size()); }

  /// Shape (rows, cols) of the signal that level k (0-based) decomposes.
  std::pair<Eigen::Index, Eigen::Index> input_shape(int k) const {
    Eigen::Index r = height;
    Eigen::Index c = width;
    for (int i = 0; i < k; ++i) {
      r = half_length(r);
      c = half_length(c);
    }
    return {r, c};
  }
};

/// Deepest J for which every level still decomposes a plane of at least 2x2.
constexpr int max_levels(Eigen::Index width, Eigen::Index height) {
  int j = 0;
  while (width >= 2 && height >= 2) {
    width = half_length(width);
    height = half_length(height);
    ++j;
  }
  return j;
}

inline void check_levels(int levels, Eigen::Index width, Eigen::Index height) {
  const int max_j = max_levels(width, height);
  if (levels < 1 || levels > max_j) {
    throw ParameterError("levels=" + std::to_string(levels) + " infeasible for " +
                         std::to_string(width) + "x" + std::to_string(height) +
                         " image; max feasible J is " + std::to_string(max_j));
  }
}

template <typename Derived>
CoeffPyramid<typename Derived::Scalar> decompose(const Eigen::MatrixBase<Derived>& plane,
                                                 int levels) {
  using Scalar = typename Derived::Scalar;
  check_levels(levels, plane.cols(), plane.rows());
  CoeffPyramid<Scalar> pyr;
  pyr.width = plane.cols();
  pyr.height = plane.rows();
  pyr.levels.reserve(static_cast<std::size_t>(levels));
  Plane<Scalar> approx = plane;
  for (int j = 0; j < levels; ++j) {
    CoeffQuad<Scalar> q = dwt2_level(approx);
    pyr.levels.push_back({std::move(q.horiz), std::move(q.vert), std::move(q.diag)});
    approx = std::move(q.approx);
  }
  pyr.coarsest_approx = std::move(approx);
  return pyr;
}

/// One pyramid per channel.
template <typename Scalar>
std::vector<CoeffPyramid<Scalar>> decompose(const Image<Scalar>& img, int levels) {
  check_levels(levels, img.width(), img.height());
  std::vector<CoeffPyramid<Scalar>> out;
  out.reserve(static_cast<std::size_t>(img.channels()));
  for (const auto& p : img.planes()) out.push_back(decompose(p, levels));
  return out;
}

/// Inverse of decompose. No clamping: output is the raw real-valued plane.
template <typename Scalar>
Plane<Scalar> reconstruct(const CoeffPyramid<Scalar>& pyr) {
  require(pyr.depth() >= 1, "reconstruct: pyramid has no levels");
  Plane<Scalar> approx = pyr.coarsest_approx;
  for (int j = pyr.depth() - 1; j >= 0; --j) {
    const auto& d = pyr.levels[static_cast<std::size_t>(j)];
    const auto [rows, cols] = pyr.input_shape(j);
    CoeffQuad<Scalar> q{std::move(approx), d.horiz, d.vert, d.diag};
    approx = idwt2_level(q, rows, cols);
  }
  return approx;
}

template <typename Scalar>
Image<Scalar> reconstruct(const std::vector<CoeffPyramid<Scalar>>& pyramids) {
  std::vector<Plane<Scalar>> planes;
  planes.reserve(pyramids.size());
  for (const auto& pyr : pyramids) planes.push_back(reconstruct(pyr));
  return Image<Scalar>(std::move(planes));
}

/// Sum of squares of every coefficient in the pyramid.
template <typename Scalar>
Scalar energy(const CoeffPyramid<Scalar>& pyr) {
  Scalar e = pyr.coarsest_approx.squaredNorm();
  for (const auto& d : pyr.levels) {
    e += d.horiz.squaredNorm() + d.vert.squaredNorm() + d.diag.squaredNorm();
  }
  return e;
}

}  // namespace wavedge
