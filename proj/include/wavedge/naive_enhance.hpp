#pragma once

#include <string>

#include "wavedge/dwt.hpp"
#include "wavedge/image.hpp"

namespace wavedge {

/// How a real-valued result is mapped back into [0, 1].
enum class Renormalize { Rescale, Clamp };

inline Renormalize parse_renormalize(const std::string& s) {
  if (s == "rescale") return Renormalize::Rescale;
  if (s == "clamp") return Renormalize::Clamp;
  throw ParameterError("renorm must be 'rescale' or 'clamp', got '" + s + "'");
}

inline std::string to_string(Renormalize r) {
  return r == Renormalize::Rescale ? "rescale" : "clamp";
}

struct NaiveConfig {
  int levels = 2;
  Renormalize renormalize = Renormalize::Rescale;
};

/// Detail-only reconstruction before output mapping: zero the coarsest
/// approximation of a J-level pyramid and invert.
template <typename Scalar>
Image<Scalar> enhance_naive_raw(const Image<Scalar>& img, int levels) {
  auto pyramids = decompose(img, levels);
  for (auto& pyr : pyramids) pyr.coarsest_approx.setZero();
  return reconstruct(pyramids);
}

template <typename Scalar>
Image<Scalar> enhance_naive(const Image<Scalar>& img, const NaiveConfig& cfg) {
  const Image<Scalar> raw = enhance_naive_raw(img, cfg.levels);
  return cfg.renormalize == Renormalize::Rescale ? rescale_unit(raw) : clamp_unit(raw);
}

}  // namespace wavedge
