// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <vector>

#include "scisplat/core/se3.hpp"

namespace scisplat {

/// Pinhole intrinsics, shared by all frames of a capture.
struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
};

/// Depth below which points count as behind the camera.
inline constexpr double kNearClip = 0.01;

struct ProjectedPoint {
  Eigen::Vector2d pixel;
  double depth;
};

/// Pinhole projection of a world point. Throws BehindCamera when the
/// camera-frame depth is at or below the near-clip plane.
ProjectedPoint project_point(const Intrinsics& intrinsics, const Pose& pose,
                             const Eigen::Vector3d& p_world);

/// Per-frame poses plus the shared intrinsics of one capture.
struct PoseSet {
  std::vector<Pose> poses;
  Intrinsics intrinsics;
};

}  // namespace scisplat
