// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0
//
// Analytic gradients of rasterized images with respect to every Gaussian
// attribute and the per-frame pose twists. Per-pixel transmittance is
// recovered back-to-front from the aux records instead of storing all
// intermediates.

#pragma once

#include <utility>
#include <vector>

#include "scisplat/core/camera.hpp"
#include "scisplat/core/image.hpp"
#include "scisplat/splat/cloud.hpp"
#include "scisplat/splat/render.hpp"

namespace scisplat {

struct CloudGradients {
  std::vector<Eigen::Vector3d> positions;
  std::vector<Eigen::Vector3d> log_scales;
  std::vector<Eigen::Vector4d> rotations;  // raw-quaternion gradients, normalization-aware
  std::vector<double> opacity_logits;
  std::vector<Eigen::Vector3d> color_logits;
  std::vector<std::int64_t> contrib_counts;    // pixels that received a contribution
  std::vector<double> screen_grad_norm;        // accumulated |dL/d center2d|, densify bookkeeping

  void resize(std::size_t n);
  void set_zero();
  bool all_finite() const;
};

struct PoseGradients {
  std::vector<Twist> twists;  // left-multiplied tangent convention, one per frame
};

/// Gradients of one view. `upstream` is dL/d(rendered image), 3 channels.
/// Accumulates into `cloud_grads` (must be pre-sized) and `pose_twist`.
/// Throws StaleAux when the aux does not match the cloud revision.
void backward_view(const GaussianCloud& cloud, const Pose& pose, const Intrinsics& intrinsics,
                   const ImagePlane& upstream, const RasterAux& aux,
                   CloudGradients& cloud_grads, Twist& pose_twist);

/// All views at once; upstream and aux run parallel to poses.poses.
std::pair<CloudGradients, PoseGradients> backward(const GaussianCloud& cloud,
                                                  const PoseSet& poses,
                                                  const std::vector<ImagePlane>& upstream,
                                                  const std::vector<RasterAux>& aux);

}  // namespace scisplat
