#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "wavedge/dwt.hpp"
#include "wavedge/gaussian.hpp"
#include "wavedge/image.hpp"

namespace wavedge {

using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Wavelet gradient: modulus sqrt(Wx^2 + Wy^2) and four-quadrant angle atan2(Wy, Wx).
template <typename Scalar>
struct GradientField {
  Plane<Scalar> modulus;
  Plane<Scalar> angle;  // (-pi, pi]; 0 wherever modulus is 0

  Eigen::Index rows() const { return modulus.rows(); }
  Eigen::Index cols() const { return modulus.cols(); }
};

/// Angle in (-pi, pi] with atan2(0, 0) pinned to 0 regardless of zero signs.
template <typename Scalar>
Scalar gradient_angle(Scalar wy, Scalar wx) {
  if (wx == Scalar(0) && wy == Scalar(0)) return Scalar(0);
  const Scalar a = std::atan2(wy, wx);
  return a <= -std::numbers::pi_v<Scalar> ? std::numbers::pi_v<Scalar> : a;
}

/// Builds the gradient from explicit x- and y-derivative fields.
template <typename DerivedX, typename DerivedY>
GradientField<typename DerivedX::Scalar> gradient_field(const Eigen::MatrixBase<DerivedX>& wx,
                                                        const Eigen::MatrixBase<DerivedY>& wy) {
  using Scalar = typename DerivedX::Scalar;
  require(wx.rows() == wy.rows() && wx.cols() == wy.cols(),
          "gradient_field: Wx and Wy differ in shape");
  GradientField<Scalar> g;
  g.modulus = (wx.array().square() + wy.array().square()).sqrt().matrix();
  g.angle.resize(wx.rows(), wx.cols());
  for (Eigen::Index y = 0; y < wx.rows(); ++y) {
    for (Eigen::Index x = 0; x < wx.cols(); ++x) {
      g.angle(y, x) = gradient_angle<Scalar>(wy(y, x), wx(y, x));
    }
  }
  return g;
}

/// Wx is the HL (`vert`) subband, Wy the LH (`horiz`) subband.
template <typename Scalar>
GradientField<Scalar> gradient_field(const CoeffQuad<Scalar>& quad) {
  return gradient_field(quad.vert, quad.horiz);
}

/// Gradient direction quantized to the four neighbor axes.
enum class Direction { Horizontal, Vertical, Diagonal, AntiDiagonal };

/// Folds the angle modulo pi and bins it into +-pi/8 sectors around 0, pi/4, pi/2, 3pi/4.
/// Boundaries go to the earlier case in Horizontal, Vertical, Diagonal order.
template <typename Scalar>
Direction quantize_direction(Scalar angle) {
  constexpr double pi = std::numbers::pi;
  double a = static_cast<double>(angle);
  if (a < 0.0) a += pi;
  if (a >= pi) a -= pi;
  if (a <= pi / 8 || a >= 7 * pi / 8) return Direction::Horizontal;
  if (a >= 3 * pi / 8 && a <= 5 * pi / 8) return Direction::Vertical;
  if (a > pi / 8 && a < 3 * pi / 8) return Direction::Diagonal;
  return Direction::AntiDiagonal;
}

/// Offset (dx, dy) of the forward comparison neighbor; the other is its negation.
constexpr std::pair<int, int> neighbor_offset(Direction d) {
  switch (d) {
    case Direction::Horizontal: return {1, 0};
    case Direction::Vertical: return {0, 1};
    case Direction::Diagonal: return {1, 1};
    case Direction::AntiDiagonal: return {1, -1};
  }
  return {0, 0};
}

/// Retained local maxima; values are the modulus where kept and 0 elsewhere.
template <typename Scalar>
struct EdgeMap {
  Plane<Scalar> values;

  Mask mask() const { return (values.array() > Scalar(0)).matrix(); }
  Eigen::Index count() const { return (values.array() > Scalar(0)).count(); }
};

/// Non-maximal suppression: keep a pixel iff its modulus strictly exceeds both
/// neighbors along its quantized gradient direction. Border pixels are dropped.
template <typename Scalar>
EdgeMap<Scalar> nms(const GradientField<Scalar>& field) {
  const Eigen::Index rows = field.rows();
  const Eigen::Index cols = field.cols();
  EdgeMap<Scalar> out{Plane<Scalar>::Zero(rows, cols)};
  const auto& m = field.modulus;
  for (Eigen::Index y = 1; y + 1 < rows; ++y) {
    for (Eigen::Index x = 1; x + 1 < cols; ++x) {
      const auto [dx, dy] = neighbor_offset(quantize_direction(field.angle(y, x)));
      const Scalar v = m(y, x);
      if (v > m(y + dy, x + dx) && v > m(y - dy, x - dx)) out.values(y, x) = v;
    }
  }
  return out;
}

struct FixedThreshold {
  double value = 0.0;
};

struct QuantileThreshold {
  double q = 0.75;
};

using ThresholdPolicy = std::variant<FixedThreshold, QuantileThreshold>;

inline void validate(const ThresholdPolicy& policy) {
  if (const auto* f = std::get_if<FixedThreshold>(&policy)) {
    if (!(f->value >= 0.0) || !std::isfinite(f->value)) {
      throw ParameterError("fixed threshold must be finite and >= 0");
    }
  } else {
    const double q = std::get<QuantileThreshold>(policy).q;
    if (!(q >= 0.0 && q < 1.0)) throw ParameterError("quantile must lie in [0, 1)");
  }
}

/// Parses "fixed:T" or "quantile:Q".
inline ThresholdPolicy parse_threshold(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    throw ParameterError("threshold must be fixed:T or quantile:Q, got '" + s + "'");
  }
  const std::string kind = s.substr(0, colon);
  const std::string arg = s.substr(colon + 1);
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(arg, &used);
    if (used != arg.size()) throw std::invalid_argument(arg);
  } catch (const std::exception&) {
    throw ParameterError("threshold argument is not a number: '" + arg + "'");
  }
  ThresholdPolicy p;
  if (kind == "fixed") {
    p = FixedThreshold{v};
  } else if (kind == "quantile") {
    p = QuantileThreshold{v};
  } else {
    throw ParameterError("unknown threshold kind '" + kind + "'");
  }
  validate(p);
  return p;
}

inline std::string to_string(const ThresholdPolicy& p) {
  if (const auto* f = std::get_if<FixedThreshold>(&p)) return "fixed:" + std::to_string(f->value);
  return "quantile:" + std::to_string(std::get<QuantileThreshold>(p).q);
}

/// Linear-interpolated quantile of the sorted values (q = 0 gives the minimum).
template <typename Scalar>
Scalar sorted_quantile(const std::vector<Scalar>& sorted, double q) {
  require(!sorted.empty(), "sorted_quantile: empty input");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + static_cast<Scalar>(h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Zeroes values below the cutoff. Quantile cutoffs are taken over nonzero values only.
template <typename Scalar>
EdgeMap<Scalar> threshold(const EdgeMap<Scalar>& edges, const ThresholdPolicy& policy) {
  validate(policy);
  Scalar cutoff = 0;
  if (const auto* f = std::get_if<FixedThreshold>(&policy)) {
    cutoff = static_cast<Scalar>(f->value);
  } else {
    std::vector<Scalar> nonzero;
    for (Eigen::Index i = 0; i < edges.values.size(); ++i) {
      if (edges.values.data()[i] > Scalar(0)) nonzero.push_back(edges.values.data()[i]);
    }
    if (nonzero.empty()) return edges;
    std::sort(nonzero.begin(), nonzero.end());
    cutoff = sorted_quantile(nonzero, std::get<QuantileThreshold>(policy).q);
  }
  EdgeMap<Scalar> out{(edges.values.array() < cutoff).select(Scalar(0), edges.values)};
  return out;
}

/// How the single edge map is written back into the three detail subbands.
enum class EdgeInjection { MaskDetails, SplitByAngle };

inline EdgeInjection parse_injection(const std::string& s) {
  if (s == "mask") return EdgeInjection::MaskDetails;
  if (s == "angle") return EdgeInjection::SplitByAngle;
  throw ParameterError("inject must be 'mask' or 'angle', got '" + s + "'");
}

inline std::string to_string(EdgeInjection e) {
  return e == EdgeInjection::MaskDetails ? "mask" : "angle";
}

struct MMConfig {
  double sigma = 1.0;
  ThresholdPolicy threshold = QuantileThreshold{0.75};
  EdgeInjection injection = EdgeInjection::MaskDetails;
};

/// Replaces the detail subbands of `quad` by the edge representation.
template <typename Scalar>
CoeffQuad<Scalar> inject_edges(const CoeffQuad<Scalar>& quad, const EdgeMap<Scalar>& edges,
                               const GradientField<Scalar>& field, EdgeInjection mode) {
  const auto keep = edges.values.array() > Scalar(0);
  CoeffQuad<Scalar> out;
  out.approx = quad.approx;
  if (mode == EdgeInjection::MaskDetails) {
    out.horiz = keep.select(quad.horiz, Scalar(0));
    out.vert = keep.select(quad.vert, Scalar(0));
    out.diag = keep.select(quad.diag, Scalar(0));
  } else {
    out.vert = (edges.values.array() * field.angle.array().cos()).matrix();
    out.horiz = (edges.values.array() * field.angle.array().sin()).matrix();
    out.diag = Plane<Scalar>::Zero(quad.rows(), quad.cols());
  }
  return out;
}

/// Every intermediate of the modulus-maxima pipeline for one plane.
template <typename Scalar>
struct MMPlaneStages {
  Plane<Scalar> smoothed;
  CoeffQuad<Scalar> quad;
  GradientField<Scalar> field;
  EdgeMap<Scalar> maxima;
  EdgeMap<Scalar> thresholded;
  Plane<Scalar> reconstructed;  // before output mapping
};

template <typename Derived>
MMPlaneStages<typename Derived::Scalar> enhance_mm_plane(const Eigen::MatrixBase<Derived>& plane,
                                                         const MMConfig& cfg) {
  using Scalar = typename Derived::Scalar;
  require(plane.rows() >= 2 && plane.cols() >= 2, "enhance_mm: image must be at least 2x2");
  validate(cfg.threshold);
  MMPlaneStages<Scalar> s;
  s.smoothed = gaussian_smooth(plane, cfg.sigma);
  s.quad = dwt2_level(s.smoothed);
  s.field = gradient_field(s.quad);
  s.maxima = nms(s.field);
  s.thresholded = threshold(s.maxima, cfg.threshold);
  s.reconstructed = idwt2_level(inject_edges(s.quad, s.thresholded, s.field, cfg.injection),
                                plane.rows(), plane.cols());
  return s;
}

/// Smooth, one-level DWT, gradient, NMS, threshold, reinject, invert, clamp to [0, 1].
template <typename Scalar>
Image<Scalar> enhance_mm(const Image<Scalar>& img, const MMConfig& cfg) {
  return img.map_planes([&](const Plane<Scalar>& p) -> Plane<Scalar> {
    return enhance_mm_plane(p, cfg).reconstructed.cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
  });
}

}  // namespace wavedge
