// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace scisplat {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Inverse sigmoid with clamping so seeding from measured values stays finite.
inline double logit(double p) {
  const double q = std::min(std::max(p, 1e-6), 1.0 - 1e-6);
  return std::log(q / (1.0 - q));
}

/// Explicit scene representation, struct-of-arrays over M Gaussians.
/// Scales are stored as logs, opacity and color as logits, so every update
/// stays in-range by construction. Quaternions are (w, x, y, z), kept
/// unit-norm after each optimizer step.
struct GaussianCloud {
  std::vector<Eigen::Vector3d> positions;
  std::vector<Eigen::Vector3d> log_scales;
  std::vector<Eigen::Vector4d> rotations;
  std::vector<double> opacity_logits;
  std::vector<Eigen::Vector3d> color_logits;

  /// Bumped on every mutation by the trainer; rasterize snapshots it so a
  /// backward pass can detect stale aux records.
  std::uint64_t revision = 0;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }

  void resize(std::size_t n) {
    positions.resize(n, Eigen::Vector3d::Zero());
    log_scales.resize(n, Eigen::Vector3d::Zero());
    rotations.resize(n, Eigen::Vector4d(1, 0, 0, 0));
    opacity_logits.resize(n, 0.0);
    color_logits.resize(n, Eigen::Vector3d::Zero());
  }

  double opacity(std::size_t i) const { return sigmoid(opacity_logits[i]); }
  Eigen::Vector3d color(std::size_t i) const {
    const Eigen::Vector3d& l = color_logits[i];
    return {sigmoid(l.x()), sigmoid(l.y()), sigmoid(l.z())};
  }
  Eigen::Vector3d scale(std::size_t i) const {
    return log_scales[i].array().exp().matrix();
  }

  void normalize_rotations() {
    for (auto& q : rotations) q.normalize();
  }
};

/// Sigma = R S S^T R^T from a log-scale triple and a (w, x, y, z) quaternion.
/// The quaternion is normalized internally. Symmetric positive definite for
/// finite inputs.
Eigen::Matrix3d covariance_from_scale_rotation(const Eigen::Vector3d& log_scale,
                                               const Eigen::Vector4d& quaternion);

/// Rotation matrix of a (w, x, y, z) quaternion, normalized internally.
Eigen::Matrix3d rotation_from_quaternion(const Eigen::Vector4d& quaternion);

}  // namespace scisplat
