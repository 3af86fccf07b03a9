// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/splat/project.hpp"

#include <cmath>

namespace scisplat {

Eigen::Matrix<double, 2, 3> projection_jacobian(const Intrinsics& intrinsics,
                                                const Eigen::Vector3d& p_cam) {
  const double x = p_cam.x(), y = p_cam.y(), z = p_cam.z();
  Eigen::Matrix<double, 2, 3> j;
  j << intrinsics.fx / z, 0.0, -intrinsics.fx * x / (z * z),
       0.0, intrinsics.fy / z, -intrinsics.fy * y / (z * z);
  return j;
}

std::optional<Projected2D> project_gaussian(const Eigen::Vector3d& position,
                                            const Eigen::Vector3d& log_scale,
                                            const Eigen::Vector4d& quaternion, double opacity,
                                            const Pose& pose, const Intrinsics& intrinsics) {
  const Eigen::Vector3d p_cam = pose.apply(position);
  if (p_cam.z() <= kNearClip) return std::nullopt;

  const double o_eff = std::min(opacity, kAlphaClamp);
  if (o_eff <= kAlphaSkip) return std::nullopt;  // can never pass the skip threshold

  const Eigen::Matrix3d sigma_world = covariance_from_scale_rotation(log_scale, quaternion);
  const Eigen::Matrix3d sigma_cam = pose.rotation * sigma_world * pose.rotation.transpose();
  const Eigen::Matrix<double, 2, 3> j = projection_jacobian(intrinsics, p_cam);

  Projected2D out;
  out.cov2d = j * sigma_cam * j.transpose();
  out.cov2d(0, 0) += kBlurFloor;
  out.cov2d(1, 1) += kBlurFloor;
  out.depth = p_cam.z();
  out.center = {intrinsics.fx * p_cam.x() / p_cam.z() + intrinsics.cx,
                intrinsics.fy * p_cam.y() / p_cam.z() + intrinsics.cy};

  const double mid = 0.5 * (out.cov2d(0, 0) + out.cov2d(1, 1));
  const double disc = std::sqrt(std::max(
      0.25 * (out.cov2d(0, 0) - out.cov2d(1, 1)) * (out.cov2d(0, 0) - out.cov2d(1, 1)) +
          out.cov2d(0, 1) * out.cov2d(0, 1),
      0.0));
  const double lambda_max = mid + disc;

  // Outside |delta| = radius the Mahalanobis exponent already exceeds
  // log(o / skip), so alpha falls under the skip threshold; the safety factor
  // keeps that guarantee through floating point.
  const double sigma_cut = std::log(o_eff / kAlphaSkip);
  out.radius = std::sqrt(2.0 * sigma_cut * lambda_max) * (1.0 + 1e-6);
  if (out.radius < kMinRadius) return std::nullopt;
  return out;
}

std::optional<Projected2D> project_gaussian(const GaussianCloud& cloud, std::size_t index,
                                            const Pose& pose, const Intrinsics& intrinsics) {
  return project_gaussian(cloud.positions[index], cloud.log_scales[index],
                          cloud.rotations[index], cloud.opacity(index), pose, intrinsics);
}

}  // namespace scisplat
