// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "scisplat/core/image.hpp"
#include "scisplat/sci/masks.hpp"

namespace scisplat {

/// One compressed exposure. Values accumulate up to n_frames modulated frames,
/// so they may exceed 1; they stay finite and non-negative.
struct Measurement {
  ImagePlane image;
  double noise_sigma = 0.0;
};

/// Forward model: Y = sum_i X_i (*) M_i + Z, with Z i.i.d. Gaussian of the
/// given sigma added once to the accumulated image (omitted when sigma = 0)
/// and negative post-noise values clamped to zero. RGB frames share the same
/// mask across channels. Frame count and shapes must match the mask stack.
Measurement synthesize_measurement(const std::vector<ImagePlane>& frames,
                                   const MaskStack& masks, double noise_sigma,
                                   std::uint64_t seed);

/// Normalized measurement plus a per-pixel validity flag; pixels never sampled
/// by any mask (zero mask-sum) read 0 and are flagged invalid.
struct NormalizedMeasurement {
  ImagePlane image;
  std::vector<std::uint8_t> valid;  // one flag per pixel (all channels share it)
};

/// Elementwise Y / sum_i M_i with the zero-sum contract above.
NormalizedMeasurement normalize_measurement(const Measurement& y, const MaskStack& masks);

}  // namespace scisplat
