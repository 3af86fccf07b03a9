// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0
//
// Degraded-frame extraction: the per-frame low-frequency estimates pulled out
// of a single measurement by mask thresholding and nearest-valid fill. Used
// only to bootstrap training.

#pragma once

#include <cstdint>
#include <vector>

#include "scisplat/core/image.hpp"
#include "scisplat/sci/measurement.hpp"

namespace scisplat {

/// Per-frame estimate plus which pixels were actually measured.
struct DegradedFrame {
  ImagePlane image;
  std::vector<std::uint8_t> validity;  // one flag per pixel
};

/// Selection matrix: true where the mask value is >= tau. tau in (0, 1].
std::vector<std::uint8_t> select_mask(const double* mask_frame, int height, int width,
                                      double tau);

/// Fills invalid pixels with the value of the nearest valid pixel (Euclidean
/// pixel distance, ties broken by row-major order). Valid pixels pass through
/// untouched. Throws EmptySelection when nothing is valid.
ImagePlane fill_interpolate(const ImagePlane& sparse, const std::vector<std::uint8_t>& validity);

/// Per-frame degraded estimates from one measurement: normalize, select with
/// tau, fill. Valid pixels carry the normalized-measurement value exactly.
std::vector<DegradedFrame> extract_degraded_frames(const Measurement& y, const MaskStack& masks,
                                                   double tau);

}  // namespace scisplat
