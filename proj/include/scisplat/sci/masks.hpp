// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "scisplat/core/image.hpp"

namespace scisplat {

/// Per-frame modulation masks. Synthetic masks are strictly binary; imported
/// real masks may carry values anywhere in [0, 1].
struct MaskStack {
  int n_frames = 0;
  int height = 0;
  int width = 0;
  std::vector<double> values;  // frame-major: (i * height + y) * width + x
  double nominal_or = 1.0;     // target overlapping ratio in (0, 1]
  std::uint64_t seed = 0;

  double at(int frame, int y, int x) const {
    return values[(static_cast<std::size_t>(frame) * height + y) * width + x];
  }
  double& at(int frame, int y, int x) {
    return values[(static_cast<std::size_t>(frame) * height + y) * width + x];
  }
  std::size_t frame_size() const { return static_cast<std::size_t>(height) * width; }
};

/// Random binary masks with every cell independently Bernoulli(overlap_ratio).
/// Deterministic per seed and independent of threading. Throws InvalidRatio
/// unless overlap_ratio is in (0, 1].
MaskStack generate_masks(int height, int width, int n_frames, double overlap_ratio,
                         std::uint64_t seed);

/// Per-pixel sum over frames, the denominator of measurement normalization.
ImagePlane mask_sum(const MaskStack& masks);

/// Empirical overlapping rate: mean mask value over all cells.
double empirical_overlap_ratio(const MaskStack& masks);

}  // namespace scisplat
