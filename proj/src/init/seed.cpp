// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/init/seed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scisplat/core/errors.hpp"
#include "scisplat/core/rng.hpp"

namespace scisplat {

SparsePoints downsample_points(const SparsePoints& points, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidSpec("downsample target must be >= 1");
  if (points.positions.size() <= n) return points;

  // Partial Fisher-Yates: the first n slots end up a uniform subset.
  std::vector<std::size_t> order(points.positions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.uniform_int(order.size() - i);
    std::swap(order[i], order[j]);
  }
  SparsePoints out;
  out.positions.reserve(n);
  if (points.has_colors()) out.colors.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.positions.push_back(points.positions[order[i]]);
    if (points.has_colors()) out.colors.push_back(points.colors[order[i]]);
  }
  return out;
}

namespace {

// Mean distance to the (up to) 3 nearest neighbours; brute force is fine at
// the point counts the downsampler leaves behind.
double mean_knn_distance(const std::vector<Eigen::Vector3d>& positions, std::size_t i) {
  constexpr std::size_t k = 3;
  double best[k] = {std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (j == i) continue;
    const double d = (positions[j] - positions[i]).norm();
    if (d < best[0]) {
      best[2] = best[1]; best[1] = best[0]; best[0] = d;
    } else if (d < best[1]) {
      best[2] = best[1]; best[1] = d;
    } else if (d < best[2]) {
      best[2] = d;
    }
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (double d : best) {
    if (std::isfinite(d)) { sum += d; ++count; }
  }
  if (count == 0) return 0.1;  // lone point: fall back to a nominal scale
  return sum / static_cast<double>(count);
}

}  // namespace

GaussianCloud init_gaussians(const SparsePoints& points, const std::vector<DegradedFrame>& frames,
                             const PoseSet& poses) {
  if (points.positions.empty()) throw InvalidSpec("cannot seed Gaussians from zero points");
  const std::size_t n = points.positions.size();

  GaussianCloud cloud;
  cloud.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.positions[i] = points.positions[i];
    cloud.rotations[i] = Eigen::Vector4d(1, 0, 0, 0);
    cloud.opacity_logits[i] = logit(0.1);

    const double s = std::max(mean_knn_distance(points.positions, i), 1e-6);
    cloud.log_scales[i] = Eigen::Vector3d::Constant(std::log(s));

    Eigen::Vector3d color(0.5, 0.5, 0.5);
    if (points.has_colors()) {
      color = points.colors[i];
    } else if (!frames.empty() && !poses.poses.empty()) {
      try {
        const ProjectedPoint proj =
            project_point(poses.intrinsics, poses.poses.front(), points.positions[i]);
        const ImagePlane& img = frames.front().image;
        const int x = static_cast<int>(std::floor(proj.pixel.x()));
        const int y = static_cast<int>(std::floor(proj.pixel.y()));
        if (x >= 0 && x < img.width && y >= 0 && y < img.height) {
          if (img.channels == 3) {
            color = {img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2)};
          } else {
            color = Eigen::Vector3d::Constant(img.at(y, x, 0));
          }
        }
      } catch (const BehindCamera&) {
        // keep mid-gray
      }
    }
    cloud.color_logits[i] = {logit(color.x()), logit(color.y()), logit(color.z())};
  }
  return cloud;
}

PoseSet spline_poses(const Pose& t_start, const Pose& t_end, int n, const Intrinsics& intrinsics) {
  if (n < 1) throw InvalidSpec("pose count must be >= 1");
  PoseSet set;
  set.intrinsics = intrinsics;
  set.poses.reserve(n);
  if (n == 1) {
    set.poses.push_back(t_start);
    return set;
  }
  for (int i = 1; i <= n; ++i) set.poses.push_back(interpolate_pose(t_start, t_end, i, n));
  return set;
}

PoseSet perturb_poses(const PoseSet& reference, double sigma_rot, double sigma_trans,
                      std::uint64_t seed) {
  Rng rng(seed);
  PoseSet out;
  out.intrinsics = reference.intrinsics;
  out.poses.reserve(reference.poses.size());
  for (const Pose& pose : reference.poses) {
    Twist noise;
    for (int k = 0; k < 3; ++k) noise[k] = sigma_rot * rng.normal();
    for (int k = 3; k < 6; ++k) noise[k] = sigma_trans * rng.normal();
    out.poses.push_back(se3_exp(noise).compose(pose));
  }
  return out;
}

SparsePoints random_box_points(const Eigen::Vector3d& box_min, const Eigen::Vector3d& box_max,
                               std::size_t count, std::uint64_t seed) {
  if (count < 1) throw InvalidSpec("point count must be >= 1");
  Rng rng(seed);
  SparsePoints out;
  out.positions.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::Vector3d p;
    for (int k = 0; k < 3; ++k) p[k] = rng.uniform(box_min[k], box_max[k]);
    out.positions.push_back(p);
  }
  return out;
}

}  // namespace scisplat
