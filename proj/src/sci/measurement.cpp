// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/sci/measurement.hpp"

#include <algorithm>

#include "scisplat/core/errors.hpp"
#include "scisplat/core/parallel.hpp"
#include "scisplat/core/rng.hpp"

namespace scisplat {

Measurement synthesize_measurement(const std::vector<ImagePlane>& frames,
                                   const MaskStack& masks, double noise_sigma,
                                   std::uint64_t seed) {
  if (static_cast<int>(frames.size()) != masks.n_frames) {
    throw ShapeMismatch("frame count does not match mask stack");
  }
  if (frames.empty()) throw ShapeMismatch("no frames to synthesize from");
  const int h = frames[0].height;
  const int w = frames[0].width;
  const int ch = frames[0].channels;
  if (h != masks.height || w != masks.width) {
    throw ShapeMismatch("frame shape does not match mask stack");
  }
  for (const ImagePlane& f : frames) {
    if (!f.same_shape(frames[0])) throw ShapeMismatch("frames disagree on shape");
  }

  Measurement out;
  out.image = ImagePlane::zeros(h, w, ch);
  out.noise_sigma = noise_sigma;

  // Accumulate frame by frame so each pixel sums in frame order; tests pin
  // this order bit-exactly against a scalar evaluation of the model.
  for (int i = 0; i < masks.n_frames; ++i) {
    const double* mask = masks.values.data() + i * masks.frame_size();
    const ImagePlane& frame = frames[i];
    parallel_for(static_cast<std::int64_t>(h) * w, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t p = begin; p < end; ++p) {
        const double m = mask[p];
        for (int c = 0; c < ch; ++c) {
          out.image.data[p * ch + c] += frame.data[p * ch + c] * m;
        }
      }
    });
  }

  if (noise_sigma > 0.0) {
    parallel_for(static_cast<std::int64_t>(out.image.size()),
                 [&](std::int64_t begin, std::int64_t end) {
                   for (std::int64_t k = begin; k < end; ++k) {
                     double v = out.image.data[k] +
                                noise_sigma * counter_normal(seed, static_cast<std::uint64_t>(k));
                     out.image.data[k] = std::max(v, 0.0);
                   }
                 });
  }
  return out;
}

NormalizedMeasurement normalize_measurement(const Measurement& y, const MaskStack& masks) {
  if (y.image.height != masks.height || y.image.width != masks.width) {
    throw ShapeMismatch("measurement shape does not match mask stack");
  }
  const ImagePlane sums = mask_sum(masks);
  const int ch = y.image.channels;

  NormalizedMeasurement out;
  out.image = ImagePlane::zeros(y.image.height, y.image.width, ch);
  out.valid.assign(y.image.pixel_count(), 1);
  for (std::size_t p = 0; p < y.image.pixel_count(); ++p) {
    const double s = sums.data[p];
    if (s <= 0.0) {
      out.valid[p] = 0;
      continue;  // image already zero there
    }
    for (int c = 0; c < ch; ++c) {
      out.image.data[p * ch + c] = y.image.data[p * ch + c] / s;
    }
  }
  return out;
}

}  // namespace scisplat
