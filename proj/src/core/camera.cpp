// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/core/camera.hpp"

#include "scisplat/core/errors.hpp"

namespace scisplat {

ProjectedPoint project_point(const Intrinsics& intrinsics, const Pose& pose,
                             const Eigen::Vector3d& p_world) {
  const Eigen::Vector3d p_cam = pose.apply(p_world);
  if (p_cam.z() <= kNearClip) throw BehindCamera();
  return {{intrinsics.fx * p_cam.x() / p_cam.z() + intrinsics.cx,
           intrinsics.fy * p_cam.y() / p_cam.z() + intrinsics.cy},
          p_cam.z()};
}

}  // namespace scisplat
