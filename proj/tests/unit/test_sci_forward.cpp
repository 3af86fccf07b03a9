// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "scisplat/core/errors.hpp"
#include "scisplat/core/parallel.hpp"
#include "scisplat/core/rng.hpp"
#include "scisplat/sci/measurement.hpp"
#include "support/oracles.hpp"

using namespace scisplat;

namespace {

std::vector<ImagePlane> random_frames(int n, int h, int w, int ch, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ImagePlane> frames;
  for (int i = 0; i < n; ++i) {
    ImagePlane img(h, w, ch);
    for (double& v : img.data) v = rng.uniform();
    frames.push_back(std::move(img));
  }
  return frames;
}

}  // namespace

TEST_CASE("generate_masks rejects ratios outside (0, 1]") {
  CHECK_THROWS_AS(generate_masks(4, 4, 2, 0.0, 0), InvalidRatio);
  CHECK_THROWS_AS(generate_masks(4, 4, 2, 1.5, 0), InvalidRatio);
  CHECK_THROWS_AS(generate_masks(4, 4, 2, -0.25, 0), InvalidRatio);
}

TEST_CASE("overlap ratio 1 gives all-ones masks") {
  const MaskStack masks = generate_masks(8, 8, 4, 1.0, 3);
  for (double v : masks.values) CHECK(v == 1.0);
}

TEST_CASE("masks are binary and hit the target rate at the operating point") {
  // 0.25 is the best-performing overlapping rate; check the empirical mean
  // over 1e6 cells against three binomial standard deviations.
  const int h = 250, w = 250, n = 16;  // 1e6 cells
  const MaskStack masks = generate_masks(h, w, n, 0.25, 99);
  for (double v : masks.values) CHECK((v == 0.0 || v == 1.0));
  const double mean = empirical_overlap_ratio(masks);
  const double sigma3 = 3.0 * std::sqrt(0.25 * 0.75 / (double(h) * w * n));
  CHECK(std::abs(mean - 0.25) < sigma3);
}

TEST_CASE("mask generation is deterministic per seed and thread count") {
  const MaskStack a = generate_masks(32, 17, 8, 0.25, 1234);
  set_thread_limit(1);
  const MaskStack b = generate_masks(32, 17, 8, 0.25, 1234);
  set_thread_limit(0);
  CHECK(a.values == b.values);
  const MaskStack c = generate_masks(32, 17, 8, 0.25, 1235);
  CHECK(a.values != c.values);
}

TEST_CASE("single frame with an all-ones mask passes through") {
  auto frames = random_frames(1, 8, 8, 1, 5);
  const MaskStack masks = generate_masks(8, 8, 1, 1.0, 0);
  const Measurement y = synthesize_measurement(frames, masks, 0.0, 0);
  CHECK(y.image.data == frames[0].data);
}

TEST_CASE("one-pixel direct sum") {
  std::vector<ImagePlane> frames = {ImagePlane(1, 1, 1, 0.2), ImagePlane(1, 1, 1, 0.4),
                                    ImagePlane(1, 1, 1, 0.6)};
  MaskStack masks;
  masks.n_frames = 3;
  masks.height = masks.width = 1;
  masks.values = {1.0, 0.0, 1.0};
  const Measurement y = synthesize_measurement(frames, masks, 0.0, 0);
  CHECK(y.image.data[0] == doctest::Approx(0.8));
}

TEST_CASE("synthesis matches the scalar-loop model bit-exactly at CR 8") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto frames = random_frames(8, 32, 32, 1, 100 + seed);
    const MaskStack masks = generate_masks(32, 32, 8, 0.25, 200 + seed);
    const Measurement y = synthesize_measurement(frames, masks, 0.0, 0);
    const ImagePlane oracle = testing::brute_force_measurement(frames, masks);
    CHECK(y.image.data == oracle.data);
  }
}

TEST_CASE("synthesis is linear in the frames when noiseless") {
  auto f1 = random_frames(4, 16, 16, 1, 1);
  auto f2 = random_frames(4, 16, 16, 1, 2);
  const MaskStack masks = generate_masks(16, 16, 4, 0.5, 3);
  std::vector<ImagePlane> combo = f1;
  for (int i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < combo[i].data.size(); ++k) {
      combo[i].data[k] = 0.3 * f1[i].data[k] + 0.7 * f2[i].data[k];
    }
  }
  const Measurement y1 = synthesize_measurement(f1, masks, 0.0, 0);
  const Measurement y2 = synthesize_measurement(f2, masks, 0.0, 0);
  const Measurement yc = synthesize_measurement(combo, masks, 0.0, 0);
  for (std::size_t k = 0; k < yc.image.data.size(); ++k) {
    CHECK(yc.image.data[k] ==
          doctest::Approx(0.3 * y1.image.data[k] + 0.7 * y2.image.data[k]).epsilon(1e-12));
  }
}

TEST_CASE("measurement stays within the mask-sum bound") {
  auto frames = random_frames(8, 16, 16, 1, 77);
  const MaskStack masks = generate_masks(16, 16, 8, 0.5, 78);
  const Measurement y = synthesize_measurement(frames, masks, 0.0, 0);
  const ImagePlane sums = mask_sum(masks);
  for (std::size_t p = 0; p < y.image.pixel_count(); ++p) {
    CHECK(y.image.data[p] >= 0.0);
    CHECK(y.image.data[p] <= sums.data[p] + 1e-12);
  }
}

TEST_CASE("noise is seeded, additive and clamped at zero") {
  auto frames = random_frames(2, 16, 16, 1, 9);
  const MaskStack masks = generate_masks(16, 16, 2, 0.5, 10);
  const Measurement a = synthesize_measurement(frames, masks, 0.05, 42);
  const Measurement b = synthesize_measurement(frames, masks, 0.05, 42);
  const Measurement c = synthesize_measurement(frames, masks, 0.05, 43);
  CHECK(a.image.data == b.image.data);
  CHECK(a.image.data != c.image.data);
  for (double v : a.image.data) CHECK(v >= 0.0);
  CHECK(a.noise_sigma == 0.05);
}

TEST_CASE("shape mismatches are rejected") {
  auto frames = random_frames(2, 8, 8, 1, 1);
  const MaskStack masks = generate_masks(8, 8, 3, 0.5, 0);
  CHECK_THROWS_AS(synthesize_measurement(frames, masks, 0.0, 0), ShapeMismatch);
  const MaskStack small = generate_masks(4, 8, 2, 0.5, 0);
  CHECK_THROWS_AS(synthesize_measurement(frames, small, 0.0, 0), ShapeMismatch);
}

TEST_CASE("normalization divides by the mask sum") {
  // All-ones masks: normalized = Y / N.
  auto frames = random_frames(4, 8, 8, 1, 21);
  const MaskStack ones = generate_masks(8, 8, 4, 1.0, 0);
  const Measurement y = synthesize_measurement(frames, ones, 0.0, 0);
  const NormalizedMeasurement norm = normalize_measurement(y, ones);
  for (std::size_t p = 0; p < norm.image.pixel_count(); ++p) {
    CHECK(norm.valid[p] == 1);
    CHECK(norm.image.data[p] == doctest::Approx(y.image.data[p] / 4.0).epsilon(1e-12));
  }
}

TEST_CASE("normalization single-pixel example: 0.8 over mask column (1,0,1)") {
  Measurement y;
  y.image = ImagePlane(1, 1, 1, 0.8);
  MaskStack masks;
  masks.n_frames = 3;
  masks.height = masks.width = 1;
  masks.values = {1.0, 0.0, 1.0};
  const NormalizedMeasurement norm = normalize_measurement(y, masks);
  CHECK(norm.image.data[0] == doctest::Approx(0.4));
}

TEST_CASE("pixels never sampled come back zero and flagged invalid") {
  Measurement y;
  y.image = ImagePlane(1, 2, 1, 0.5);
  MaskStack masks;
  masks.n_frames = 2;
  masks.height = 1;
  masks.width = 2;
  masks.values = {1.0, 0.0,
                  1.0, 0.0};  // second pixel untouched in both frames
  const NormalizedMeasurement norm = normalize_measurement(y, masks);
  CHECK(norm.valid[0] == 1);
  CHECK(norm.valid[1] == 0);
  CHECK(norm.image.data[1] == 0.0);
}

TEST_CASE("normalize after synthesize recovers constant frames") {
  const int n = 8;
  std::vector<ImagePlane> frames(n, ImagePlane(16, 16, 1, 0.37));
  const MaskStack masks = generate_masks(16, 16, n, 0.4, 4);
  const Measurement y = synthesize_measurement(frames, masks, 0.0, 0);
  const NormalizedMeasurement norm = normalize_measurement(y, masks);
  for (std::size_t p = 0; p < norm.image.pixel_count(); ++p) {
    if (norm.valid[p]) CHECK(norm.image.data[p] == doctest::Approx(0.37).epsilon(1e-12));
  }
}
