// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0
//
// Point-cloud preparation and Gaussian/pose seeding. External SfM results
// enter through the JSON import formats; the spline and perturbed-ground-truth
// modes cover captures without them.

#pragma once

#include <cstdint>
#include <vector>

#include "scisplat/core/camera.hpp"
#include "scisplat/init/degraded.hpp"
#include "scisplat/splat/cloud.hpp"

namespace scisplat {

struct SparsePoints {
  std::vector<Eigen::Vector3d> positions;
  std::vector<Eigen::Vector3d> colors;  // empty, or one RGB in [0,1] per point

  bool has_colors() const { return !colors.empty(); }
};

/// Uniform random subset of size n (identity when the input is already small
/// enough). Deterministic per seed; never invents points.
SparsePoints downsample_points(const SparsePoints& points, std::size_t n, std::uint64_t seed);

/// Seeds one Gaussian per point: color from the point when present, otherwise
/// sampled from the first degraded frame at the point's projection (mid-gray
/// if it projects outside every view); isotropic scale from the mean distance
/// to the 3 nearest neighbours; identity rotation; opacity 0.1.
GaussianCloud init_gaussians(const SparsePoints& points, const std::vector<DegradedFrame>& frames,
                             const PoseSet& poses);

/// N poses along the geodesic between two endpoints (the linear-trajectory
/// assumption used when no external pose estimate exists).
PoseSet spline_poses(const Pose& t_start, const Pose& t_end, int n, const Intrinsics& intrinsics);

/// Ground-truth poses with seeded tangent-space noise; sigma_rot in radians,
/// sigma_trans in scene units. The ablation fixture standing in for an
/// imperfect external pose estimate.
PoseSet perturb_poses(const PoseSet& reference, double sigma_rot, double sigma_trans,
                      std::uint64_t seed);

/// Random points in a bounding box: the deliberately weak initialization arm.
SparsePoints random_box_points(const Eigen::Vector3d& box_min, const Eigen::Vector3d& box_max,
                               std::size_t count, std::uint64_t seed);

}  // namespace scisplat
