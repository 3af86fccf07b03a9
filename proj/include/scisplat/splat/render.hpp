// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0
//
// Forward rasterization: project, sort globally by depth, composite
// front-to-back per pixel within 16x16 tiles. Binning is invisible in the
// output because the projection radius bounds where alpha can clear the skip
// threshold.

#pragma once

#include <cstdint>
#include <vector>

#include "scisplat/core/camera.hpp"
#include "scisplat/core/image.hpp"
#include "scisplat/splat/cloud.hpp"
#include "scisplat/splat/project.hpp"

namespace scisplat {

inline constexpr int kTileSize = 16;

/// One visible Gaussian in one view, everything compositing and its backward
/// pass need.
struct SplatRecord {
  int gaussian_index = 0;
  Eigen::Vector2d center;
  Eigen::Matrix2d cov;      // floored 2D covariance
  Eigen::Matrix2d cov_inv;
  double depth = 0.0;
  double radius = 0.0;
  Eigen::Vector3d cam_pos;  // Gaussian center in the camera frame
  Eigen::Vector3d color;
  double opacity = 0.0;
};

/// Forward-pass records retained for the backward pass.
struct RasterAux {
  int height = 0;
  int width = 0;
  std::uint64_t cloud_revision = 0;
  std::vector<SplatRecord> splats;            // ascending depth, ties by index
  std::vector<double> final_transmittance;    // per pixel
  std::vector<std::int32_t> last_contrib;     // per pixel, exclusive bound into the tile list
  int tiles_x = 0;
  int tiles_y = 0;
  std::vector<std::vector<int>> tile_lists;   // per tile, splat ranks in depth order
};

struct RenderResult {
  ImagePlane image;  // RGB
  RasterAux aux;
};

/// Evaluates one splat's alpha at a pixel center. Returns false when the
/// contribution is skipped (alpha below 1/255). Shared verbatim by forward
/// and backward so recomputation is bit-identical.
struct AlphaEval {
  double alpha = 0.0;
  double falloff = 0.0;       // exp(-sigma)
  bool clamped = false;
  Eigen::Vector2d grad_dir;   // cov_inv * delta
};
bool eval_splat_alpha(const SplatRecord& splat, double px, double py, AlphaEval& out);

RenderResult rasterize(const GaussianCloud& cloud, const Pose& pose,
                       const Intrinsics& intrinsics, int height, int width);

/// Rasterizes every pose in the set; output count equals pose count.
std::vector<ImagePlane> render_views(const GaussianCloud& cloud, const PoseSet& poses,
                                     int height, int width);

}  // namespace scisplat
