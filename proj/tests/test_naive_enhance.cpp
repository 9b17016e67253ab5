#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles/mnist_sample.hpp"
#include "oracles/sobel.hpp"
#include "test_util.hpp"
#include "wavedge/naive_enhance.hpp"

using namespace wavedge;
using namespace wavedge::testing;

TEST_CASE("constant image has no detail content") {
  for (int j = 1; j <= 3; ++j) {
    const ImageD raw = enhance_naive_raw(ImageD(16, 12, 1, 0.6), j);
    CHECK(raw.plane(0).cwiseAbs().maxCoeff() < 1e-9);
  }
  const ImageD clamped = enhance_naive(ImageD(8, 8, 3, 0.3), {2, Renormalize::Clamp});
  CHECK(clamped.plane(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("input minus output is the coarsest approximation alone") {
  std::mt19937_64 rng(12);
  const ImageD img = random_image(rng, 20, 12, 1);
  const int levels = 2;
  auto only_approx = decompose(img, levels);
  for (auto& pyr : only_approx) {
    for (auto& d : pyr.levels) {
      d.horiz.setZero();
      d.vert.setZero();
      d.diag.setZero();
    }
  }
  const ImageD low = reconstruct(only_approx);
  const ImageD raw = enhance_naive_raw(img, levels);
  CHECK(max_abs_diff(Plane<double>(img.plane(0) - raw.plane(0)), low.plane(0)) < 1e-12);
}

TEST_CASE("full-depth output has zero mean on dyadic shapes") {
  std::mt19937_64 rng(13);
  for (auto [w, h] : {std::pair{16, 16}, {32, 8}, {8, 64}}) {
    const ImageD img = random_image(rng, w, h, 1);
    const ImageD raw = enhance_naive_raw(img, max_levels(w, h));
    CHECK(std::abs(raw.plane(0).mean()) < 1e-9);
  }
}

TEST_CASE("re-decomposing the output gives an empty coarsest approximation") {
  std::mt19937_64 rng(14);
  const ImageD img = random_image(rng, 24, 16, 1);
  const ImageD raw = enhance_naive_raw(img, 3);
  const auto pyr = decompose(raw.plane(0), 3);
  CHECK(pyr.coarsest_approx.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("raw output is linear in the input") {
  std::mt19937_64 rng(15);
  const ImageD img = random_image(rng, 12, 12, 3);
  const ImageD scaled = img.map_planes([](const Plane<double>& p) { return Plane<double>(-2.5 * p); });
  const ImageD a = enhance_naive_raw(scaled, 2);
  const ImageD b = enhance_naive_raw(img, 2);
  for (int c = 0; c < 3; ++c) CHECK(max_abs_diff(a.plane(c), Plane<double>(-2.5 * b.plane(c))) < 1e-10);
}

TEST_CASE("output mapping lands in [0, 1] with the shape preserved") {
  std::mt19937_64 rng(16);
  const ImageD img = random_image(rng, 14, 10, 3);
  for (auto mode : {Renormalize::Rescale, Renormalize::Clamp}) {
    const ImageD out = enhance_naive(img, {2, mode});
    CHECK(out.width() == 14);
    CHECK(out.height() == 10);
    CHECK(out.channels() == 3);
    for (const auto& p : out.planes()) {
      CHECK(p.minCoeff() >= 0.0);
      CHECK(p.maxCoeff() <= 1.0);
    }
  }
  const ImageD r = enhance_naive(img, {2, Renormalize::Rescale});
  double lo = 1, hi = 0;
  for (const auto& p : r.planes()) {
    lo = std::min(lo, p.minCoeff());
    hi = std::max(hi, p.maxCoeff());
  }
  CHECK(lo == 0.0);
  CHECK(hi == doctest::Approx(1.0));
}

TEST_CASE("infeasible depth is a parameter error") {
  CHECK_THROWS_AS(enhance_naive(ImageD(8, 8, 1), {4, Renormalize::Clamp}), ParameterError);
}

TEST_CASE("MNIST digit: output energy concentrates on stroke boundaries") {
  const ImageD digit = from_u8<double>(kMnistDigitFive, 28, 28, 1);
  const ImageD raw = enhance_naive_raw(digit, 2);
  const auto band = sobel_edge_band(digit.plane(0), 0.25, 2);
  const auto e = raw.plane(0).array().square();
  const double inside = band.select(e, 0.0).sum();
  CHECK(inside / e.sum() >= 0.70);
}
