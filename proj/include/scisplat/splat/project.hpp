// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <optional>

#include "scisplat/core/camera.hpp"
#include "scisplat/splat/cloud.hpp"

namespace scisplat {

/// Rasterization constants shared by the forward pass, the backward pass and
/// the reference compositing path.
inline constexpr double kBlurFloor = 0.3;        // px^2, added to the 2D covariance diagonal
inline constexpr double kAlphaClamp = 0.999;
inline constexpr double kAlphaSkip = 1.0 / 255.0;
inline constexpr double kMinRadius = 0.3;        // px, below this a splat is culled
inline constexpr double kMinTransmittance = 1e-8;

/// Screen-space footprint of one Gaussian in one view.
struct Projected2D {
  Eigen::Vector2d center;   // pixel coordinates
  Eigen::Matrix2d cov2d;    // symmetric, blur floor included
  double depth = 0.0;       // camera-frame z
  double radius = 0.0;      // px; alpha < skip threshold outside this box
};

/// Projects one Gaussian. Returns nullopt (culled) when the center is behind
/// the near-clip plane or the contributing footprint is under kMinRadius.
///
/// The radius is the tightest box for which alpha is guaranteed below the
/// skip threshold outside, so tile binning by this box is exactly invisible
/// in the output.
std::optional<Projected2D> project_gaussian(const Eigen::Vector3d& position,
                                            const Eigen::Vector3d& log_scale,
                                            const Eigen::Vector4d& quaternion, double opacity,
                                            const Pose& pose, const Intrinsics& intrinsics);

std::optional<Projected2D> project_gaussian(const GaussianCloud& cloud, std::size_t index,
                                            const Pose& pose, const Intrinsics& intrinsics);

/// Pinhole Jacobian d(pixel)/d(camera point) evaluated at a camera-frame point.
Eigen::Matrix<double, 2, 3> projection_jacobian(const Intrinsics& intrinsics,
                                                const Eigen::Vector3d& p_cam);

}  // namespace scisplat
