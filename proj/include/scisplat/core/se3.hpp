// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0
//
// Rigid transforms and their tangent-space maps. Poses are world-to-camera:
// a world point p maps to rotation * p + translation in the camera frame.

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace scisplat {

/// Tangent coordinates of SE(3): components 0..2 rotational, 3..5 translational.
using Twist = Eigen::Matrix<double, 6, 1>;

struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose identity() { return {}; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p_world) const {
    return rotation * p_world + translation;
  }

  Pose inverse() const {
    Pose out;
    out.rotation = rotation.transpose();
    out.translation = -out.rotation * translation;
    return out;
  }

  Pose compose(const Pose& rhs) const {  // this * rhs
    Pose out;
    out.rotation = rotation * rhs.rotation;
    out.translation = rotation * rhs.translation + translation;
    return out;
  }

  /// Camera center in world coordinates (-R^T t).
  Eigen::Vector3d center() const { return -(rotation.transpose() * translation); }

  /// Max deviation of R R^T from identity plus |det - 1|.
  double orthonormality_error() const;
};

Eigen::Matrix3d skew(const Eigen::Vector3d& v);

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega);
Eigen::Vector3d so3_log(const Eigen::Matrix3d& rotation);  // throws AngleNearPi

/// SE(3) exponential. Rodrigues rotation plus the closed-form V matrix for the
/// translation part; total on finite input.
Pose se3_exp(const Twist& xi);

/// SE(3) logarithm on the principal branch. Throws AngleNearPi when
/// trace(R) <= -1 + 1e-6.
Twist se3_log(const Pose& pose);

/// Geodesic interpolation with parameter s = (i-1)/(N-1), so frame 1 is
/// exactly t_start and frame N exactly t_end. 1 <= i <= N, N >= 2.
Pose interpolate_pose(const Pose& t_start, const Pose& t_end, int i, int n);

}  // namespace scisplat
