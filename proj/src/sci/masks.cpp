// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/sci/masks.hpp"

#include "scisplat/core/errors.hpp"
#include "scisplat/core/parallel.hpp"
#include "scisplat/core/rng.hpp"

namespace scisplat {

MaskStack generate_masks(int height, int width, int n_frames, double overlap_ratio,
                         std::uint64_t seed) {
  if (!(overlap_ratio > 0.0 && overlap_ratio <= 1.0)) {
    throw InvalidRatio("overlap ratio must be in (0, 1]");
  }
  if (n_frames < 1 || height < 1 || width < 1) {
    throw InvalidSpec("mask stack dimensions must be positive");
  }
  MaskStack masks;
  masks.n_frames = n_frames;
  masks.height = height;
  masks.width = width;
  masks.nominal_or = overlap_ratio;
  masks.seed = seed;
  const std::int64_t total = static_cast<std::int64_t>(n_frames) * height * width;
  masks.values.resize(total);
  parallel_for(total, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t cell = begin; cell < end; ++cell) {
      masks.values[cell] =
          counter_uniform(seed, static_cast<std::uint64_t>(cell)) < overlap_ratio ? 1.0 : 0.0;
    }
  });
  return masks;
}

ImagePlane mask_sum(const MaskStack& masks) {
  ImagePlane sum = ImagePlane::zeros(masks.height, masks.width, 1);
  for (int i = 0; i < masks.n_frames; ++i) {
    const double* frame = masks.values.data() + i * masks.frame_size();
    for (std::size_t p = 0; p < masks.frame_size(); ++p) sum.data[p] += frame[p];
  }
  return sum;
}

double empirical_overlap_ratio(const MaskStack& masks) {
  if (masks.values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : masks.values) acc += v;
  return acc / static_cast<double>(masks.values.size());
}

}  // namespace scisplat
