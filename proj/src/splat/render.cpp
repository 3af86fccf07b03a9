// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/splat/render.hpp"

#include <algorithm>
#include <cmath>

#include "scisplat/core/parallel.hpp"

namespace scisplat {

bool eval_splat_alpha(const SplatRecord& splat, double px, double py, AlphaEval& out) {
  const double dx = px - splat.center.x();
  const double dy = py - splat.center.y();
  const double ux = splat.cov_inv(0, 0) * dx + splat.cov_inv(0, 1) * dy;
  const double uy = splat.cov_inv(1, 0) * dx + splat.cov_inv(1, 1) * dy;
  const double sigma = 0.5 * (dx * ux + dy * uy);
  if (sigma < 0.0) return false;  // degenerate covariance round-off
  const double falloff = std::exp(-sigma);
  double alpha = splat.opacity * falloff;
  bool clamped = false;
  if (alpha > kAlphaClamp) {
    alpha = kAlphaClamp;
    clamped = true;
  }
  if (alpha < kAlphaSkip) return false;
  out.alpha = alpha;
  out.falloff = falloff;
  out.clamped = clamped;
  out.grad_dir = {ux, uy};
  return true;
}

RenderResult rasterize(const GaussianCloud& cloud, const Pose& pose,
                       const Intrinsics& intrinsics, int height, int width) {
  RenderResult result;
  result.image = ImagePlane::zeros(height, width, 3);
  RasterAux& aux = result.aux;
  aux.height = height;
  aux.width = width;
  aux.cloud_revision = cloud.revision;
  aux.final_transmittance.assign(result.image.pixel_count(), 1.0);
  aux.last_contrib.assign(result.image.pixel_count(), 0);
  aux.tiles_x = (width + kTileSize - 1) / kTileSize;
  aux.tiles_y = (height + kTileSize - 1) / kTileSize;
  aux.tile_lists.assign(static_cast<std::size_t>(aux.tiles_x) * aux.tiles_y, {});

  // Project and cull.
  const std::size_t count = cloud.size();
  std::vector<SplatRecord> visible;
  visible.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto projected = project_gaussian(cloud, i, pose, intrinsics);
    if (!projected) continue;
    SplatRecord rec;
    rec.gaussian_index = static_cast<int>(i);
    rec.center = projected->center;
    rec.cov = projected->cov2d;
    const double det = rec.cov(0, 0) * rec.cov(1, 1) - rec.cov(0, 1) * rec.cov(1, 0);
    if (det <= 0.0) continue;
    rec.cov_inv << rec.cov(1, 1) / det, -rec.cov(0, 1) / det,
                   -rec.cov(1, 0) / det, rec.cov(0, 0) / det;
    rec.depth = projected->depth;
    rec.radius = projected->radius;
    rec.cam_pos = pose.apply(cloud.positions[i]);
    rec.color = cloud.color(i);
    rec.opacity = cloud.opacity(i);
    visible.push_back(rec);
  }

  // Global depth order; ties keep ascending Gaussian index so the output is
  // invariant under permutation of the input order.
  std::sort(visible.begin(), visible.end(), [](const SplatRecord& a, const SplatRecord& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.gaussian_index < b.gaussian_index;
  });
  aux.splats = std::move(visible);

  // Bin by footprint box; list entries stay in depth order.
  for (int r = 0; r < static_cast<int>(aux.splats.size()); ++r) {
    const SplatRecord& s = aux.splats[r];
    const int tx0 = std::max(0, static_cast<int>(std::floor((s.center.x() - s.radius) / kTileSize)));
    const int tx1 = std::min(aux.tiles_x - 1,
                             static_cast<int>(std::floor((s.center.x() + s.radius) / kTileSize)));
    const int ty0 = std::max(0, static_cast<int>(std::floor((s.center.y() - s.radius) / kTileSize)));
    const int ty1 = std::min(aux.tiles_y - 1,
                             static_cast<int>(std::floor((s.center.y() + s.radius) / kTileSize)));
    for (int ty = ty0; ty <= ty1; ++ty) {
      for (int tx = tx0; tx <= tx1; ++tx) {
        aux.tile_lists[static_cast<std::size_t>(ty) * aux.tiles_x + tx].push_back(r);
      }
    }
  }

  // Composite tiles in parallel; every pixel is written by exactly one tile.
  const std::int64_t n_tiles = static_cast<std::int64_t>(aux.tile_lists.size());
  parallel_for(n_tiles, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t tile = begin; tile < end; ++tile) {
      const std::vector<int>& list = aux.tile_lists[tile];
      const int tx = static_cast<int>(tile % aux.tiles_x);
      const int ty = static_cast<int>(tile / aux.tiles_x);
      const int x0 = tx * kTileSize;
      const int y0 = ty * kTileSize;
      const int x1 = std::min(x0 + kTileSize, width);
      const int y1 = std::min(y0 + kTileSize, height);
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          const double px = x + 0.5;
          const double py = y + 0.5;
          double t = 1.0;
          Eigen::Vector3d c = Eigen::Vector3d::Zero();
          std::int32_t last = 0;
          for (std::size_t k = 0; k < list.size(); ++k) {
            const SplatRecord& s = aux.splats[list[k]];
            if (std::abs(px - s.center.x()) > s.radius ||
                std::abs(py - s.center.y()) > s.radius) {
              continue;
            }
            AlphaEval ev;
            if (!eval_splat_alpha(s, px, py, ev)) continue;
            c += (ev.alpha * t) * s.color;
            t *= 1.0 - ev.alpha;
            last = static_cast<std::int32_t>(k) + 1;
            if (t < kMinTransmittance) break;
          }
          const std::size_t p = static_cast<std::size_t>(y) * width + x;
          result.image.data[p * 3 + 0] = c.x();
          result.image.data[p * 3 + 1] = c.y();
          result.image.data[p * 3 + 2] = c.z();
          aux.final_transmittance[p] = t;
          aux.last_contrib[p] = last;
        }
      }
    }
  });
  return result;
}

std::vector<ImagePlane> render_views(const GaussianCloud& cloud, const PoseSet& poses,
                                     int height, int width) {
  std::vector<ImagePlane> frames;
  frames.reserve(poses.poses.size());
  for (const Pose& pose : poses.poses) {
    frames.push_back(rasterize(cloud, pose, poses.intrinsics, height, width).image);
  }
  return frames;
}

}  // namespace scisplat
