// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/core/se3.hpp"

#include <cmath>

#include "scisplat/core/errors.hpp"

namespace scisplat {

namespace {
// Below this angle the trig coefficient ratios switch to their Taylor series.
constexpr double kSmallAngle = 1e-8;
}  // namespace

double Pose::orthonormality_error() const {
  const Eigen::Matrix3d gram = rotation * rotation.transpose();
  double err = (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  err = std::max(err, std::abs(rotation.determinant() - 1.0));
  return err;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return s;
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  const Eigen::Matrix3d w = skew(omega);
  double a, b;  // R = I + a*W + b*W^2
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Eigen::Matrix3d::Identity() + a * w + b * w * w;
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& rotation) {
  if (rotation.trace() <= -1.0 + 1e-6) throw AngleNearPi();
  // Quaternion extraction is stable over the whole principal branch.
  Eigen::Quaterniond q(rotation);
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const double vec_norm = q.vec().norm();
  const double theta = 2.0 * std::atan2(vec_norm, q.w());
  if (vec_norm < 1e-300) return Eigen::Vector3d::Zero();
  return (theta / vec_norm) * q.vec();
}

Pose se3_exp(const Twist& xi) {
  const Eigen::Vector3d omega = xi.head<3>();
  const Eigen::Vector3d v = xi.tail<3>();
  const double theta = omega.norm();
  const Eigen::Matrix3d w = skew(omega);

  double b, c;  // V = I + b*W + c*W^2
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    b = 0.5 - t2 / 24.0;
    c = 1.0 / 6.0 - t2 / 120.0;
  } else {
    b = (1.0 - std::cos(theta)) / (theta * theta);
    c = (theta - std::sin(theta)) / (theta * theta * theta);
  }
  const Eigen::Matrix3d v_mat = Eigen::Matrix3d::Identity() + b * w + c * w * w;

  Pose out;
  out.rotation = so3_exp(omega);
  out.translation = v_mat * v;
  return out;
}

Twist se3_log(const Pose& pose) {
  const Eigen::Vector3d omega = so3_log(pose.rotation);
  const double theta = omega.norm();
  const Eigen::Matrix3d w = skew(omega);

  double c;  // V^-1 = I - W/2 + c*W^2
  if (theta < kSmallAngle) {
    c = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    c = 1.0 / (theta * theta) -
        (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  const Eigen::Matrix3d v_inv =
      Eigen::Matrix3d::Identity() - 0.5 * w + c * w * w;

  Twist xi;
  xi.head<3>() = omega;
  xi.tail<3>() = v_inv * pose.translation;
  return xi;
}

Pose interpolate_pose(const Pose& t_start, const Pose& t_end, int i, int n) {
  if (n < 2 || i < 1 || i > n) {
    throw InvalidSpec("interpolate_pose requires 1 <= i <= N and N >= 2");
  }
  if (i == 1) return t_start;
  if (i == n) return t_end;
  const double s = static_cast<double>(i - 1) / static_cast<double>(n - 1);
  const Twist delta = se3_log(t_start.inverse().compose(t_end));
  return t_start.compose(se3_exp(s * delta));
}

}  // namespace scisplat
