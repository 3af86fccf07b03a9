// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "scisplat/core/camera.hpp"
#include "scisplat/core/image.hpp"

namespace scisplat {

/// PSNR in decibels for images in [0, 1], capped at 100 dB so identical
/// images produce a finite report value.
double psnr(const ImagePlane& a, const ImagePlane& b);

inline constexpr double kPsnrCap = 100.0;

/// Windowed SSIM: 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
/// dynamic range 1, mean over fully-valid window positions, channels
/// averaged. Requires min(height, width) >= 11.
double ssim(const ImagePlane& a, const ImagePlane& b);

/// Same value, and optionally d(ssim)/d(a) for use inside losses.
double ssim_with_grad(const ImagePlane& a, const ImagePlane& b, ImagePlane* grad_a);

/// Ordered camera poses with frame indices.
struct Trajectory {
  std::vector<int> indices;
  std::vector<Pose> poses;

  std::size_t size() const { return poses.size(); }
};

Trajectory trajectory_from_poses(const std::vector<Pose>& poses);

/// Absolute trajectory error: closed-form similarity alignment (rotation,
/// translation and scale) of estimated camera centers onto the reference,
/// then the RMSE of the residuals. Scale is aligned because monocular
/// reconstructions are gauge-free in scale.
double ate(const Trajectory& estimated, const Trajectory& reference);

}  // namespace scisplat
