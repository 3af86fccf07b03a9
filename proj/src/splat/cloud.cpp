// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/splat/cloud.hpp"

namespace scisplat {

Eigen::Matrix3d rotation_from_quaternion(const Eigen::Vector4d& quaternion) {
  const Eigen::Vector4d q = quaternion.normalized();
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Eigen::Matrix3d r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Eigen::Matrix3d covariance_from_scale_rotation(const Eigen::Vector3d& log_scale,
                                               const Eigen::Vector4d& quaternion) {
  const Eigen::Matrix3d r = rotation_from_quaternion(quaternion);
  const Eigen::Vector3d s2 = (2.0 * log_scale).array().exp().matrix();  // squared scales
  return r * s2.asDiagonal() * r.transpose();
}

}  // namespace scisplat
