// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/scene/synth.hpp"

#include <cmath>

#include "scisplat/core/errors.hpp"
#include "scisplat/core/rng.hpp"
#include "scisplat/splat/render.hpp"

namespace scisplat {

std::string to_string(PaletteMode mode) {
  switch (mode) {
    case PaletteMode::kRandom: return "random";
    case PaletteMode::kGradient: return "gradient";
    case PaletteMode::kChecker: return "checker";
  }
  return "random";
}

std::string to_string(TrajectoryMode mode) {
  switch (mode) {
    case TrajectoryMode::kLinear: return "linear";
    case TrajectoryMode::kArc: return "arc";
    case TrajectoryMode::kSnake: return "snake";
  }
  return "linear";
}

PaletteMode palette_mode_from_string(const std::string& s) {
  if (s == "random") return PaletteMode::kRandom;
  if (s == "gradient") return PaletteMode::kGradient;
  if (s == "checker") return PaletteMode::kChecker;
  throw InvalidSpec("unknown palette mode: " + s);
}

TrajectoryMode trajectory_mode_from_string(const std::string& s) {
  if (s == "linear") return TrajectoryMode::kLinear;
  if (s == "arc") return TrajectoryMode::kArc;
  if (s == "snake") return TrajectoryMode::kSnake;
  throw InvalidSpec("unknown trajectory mode: " + s);
}

namespace {

void validate(const SceneSpec& spec) {
  if (spec.gaussian_count < 1 || spec.compression_ratio < 1 || spec.height < 1 || spec.width < 1) {
    throw InvalidSpec("counts must be >= 1");
  }
  if (!(spec.overlap_ratio > 0.0 && spec.overlap_ratio <= 1.0)) {
    throw InvalidSpec("overlap ratio must be in (0, 1]");
  }
  if (((spec.box_max - spec.box_min).array() <= 0.0).any()) {
    throw InvalidSpec("bounding box must have positive extent");
  }
}

Pose look_at(const Eigen::Vector3d& camera_center, const Eigen::Vector3d& target) {
  const Eigen::Vector3d forward = (target - camera_center).normalized();
  const Eigen::Vector3d up_hint(0.0, 1.0, 0.0);
  Eigen::Vector3d right = up_hint.cross(forward);
  if (right.norm() < 1e-9) right = Eigen::Vector3d(1.0, 0.0, 0.0);
  right.normalize();
  const Eigen::Vector3d down = forward.cross(right);
  Pose pose;
  pose.rotation.row(0) = right;
  pose.rotation.row(1) = down;
  pose.rotation.row(2) = forward;
  pose.translation = -(pose.rotation * camera_center);
  return pose;
}

struct CameraRig {
  Eigen::Vector3d centroid;
  Eigen::Vector3d base;   // central camera position
  double distance = 1.0;
  double travel = 0.0;    // trajectory length in scene units
};

CameraRig make_rig(const SceneSpec& spec) {
  CameraRig rig;
  rig.centroid = 0.5 * (spec.box_min + spec.box_max);
  const Eigen::Vector3d half = 0.5 * (spec.box_max - spec.box_min);
  // Back the camera off along -z until the box fills roughly 70% of the image.
  const double frame_half = std::max(half.x(), half.y());
  rig.distance = std::max(frame_half / 0.35 + half.z(), 4.0 * kNearClip);
  rig.base = rig.centroid - Eigen::Vector3d(0.0, 0.0, rig.distance);
  rig.travel = spec.trajectory_extent_fraction * (spec.box_max - spec.box_min).norm();
  return rig;
}

}  // namespace

Eigen::Vector3d snake_center(const SceneSpec& spec, double s) {
  const CameraRig rig = make_rig(spec);
  const Eigen::Vector3d start = rig.base - Eigen::Vector3d(rig.travel / 2.0, 0.0, 0.0);
  const double amplitude = 0.25 * rig.travel;
  return start + Eigen::Vector3d(s * rig.travel, 0.0, 0.0) +
         amplitude * std::sin(2.0 * M_PI * spec.snake_periods * s) * Eigen::Vector3d(0.0, 1.0, 0.0);
}

SynthScene build_scene(const SceneSpec& spec) {
  validate(spec);
  Rng rng(detail::mix64(spec.seed ^ 0x7363656eull));

  SynthScene scene;
  GaussianCloud& cloud = scene.cloud;
  const Eigen::Vector3d extent = spec.box_max - spec.box_min;

  if (spec.palette == PaletteMode::kChecker) {
    // A textured plane: a dense grid of small Gaussians with alternating
    // colors, the fine-detail content reconstructions struggle with most.
    const int side = std::max(1, static_cast<int>(std::lround(std::sqrt(
                                  static_cast<double>(spec.gaussian_count)))));
    const int count = side * side;
    cloud.resize(count);
    const double z_mid = 0.5 * (spec.box_min.z() + spec.box_max.z());
    const double sx = extent.x() / side;
    const double sy = extent.y() / side;
    for (int gy = 0; gy < side; ++gy) {
      for (int gx = 0; gx < side; ++gx) {
        const int i = gy * side + gx;
        cloud.positions[i] = {spec.box_min.x() + (gx + 0.5) * sx,
                              spec.box_min.y() + (gy + 0.5) * sy, z_mid};
        const double s = 0.45 * std::min(sx, sy);
        cloud.log_scales[i] = Eigen::Vector3d::Constant(std::log(s));
        cloud.rotations[i] = Eigen::Vector4d(1, 0, 0, 0);
        cloud.opacity_logits[i] = logit(0.9);
        const bool dark = ((gx + gy) % 2) == 0;
        const Eigen::Vector3d base =
            dark ? Eigen::Vector3d(0.15, 0.2, 0.55) : Eigen::Vector3d(0.85, 0.75, 0.3);
        for (int c = 0; c < 3; ++c) {
          cloud.color_logits[i][c] = logit(base[c] + 0.05 * rng.uniform(-1.0, 1.0));
        }
      }
    }
  } else {
    cloud.resize(spec.gaussian_count);
    const double nominal =
        0.5 * std::cbrt(extent.prod() / static_cast<double>(spec.gaussian_count));
    for (int i = 0; i < spec.gaussian_count; ++i) {
      for (int k = 0; k < 3; ++k) {
        cloud.positions[i][k] = rng.uniform(spec.box_min[k], spec.box_max[k]);
      }
      for (int k = 0; k < 3; ++k) {
        cloud.log_scales[i][k] = std::log(nominal * rng.uniform(0.5, 1.5));
      }
      Eigen::Vector4d q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
      cloud.rotations[i] = q.normalized();
      cloud.opacity_logits[i] = logit(rng.uniform(0.5, 0.95));
      if (spec.palette == PaletteMode::kGradient) {
        const double t = (cloud.positions[i].x() - spec.box_min.x()) / extent.x();
        cloud.color_logits[i] = {logit(0.15 + 0.7 * t), logit(0.3),
                                 logit(0.85 - 0.7 * t)};
      } else {
        cloud.color_logits[i] = {logit(rng.uniform(0.1, 0.9)), logit(rng.uniform(0.1, 0.9)),
                                 logit(rng.uniform(0.1, 0.9))};
      }
    }
  }

  // Trajectory.
  const CameraRig rig = make_rig(spec);
  const int n = spec.compression_ratio;
  scene.poses.intrinsics = {static_cast<double>(spec.width), static_cast<double>(spec.width),
                            spec.width / 2.0, spec.height / 2.0};
  scene.poses.poses.clear();
  for (int i = 1; i <= n; ++i) {
    const double s = n == 1 ? 0.0 : static_cast<double>(i - 1) / (n - 1);
    Eigen::Vector3d center;
    switch (spec.trajectory) {
      case TrajectoryMode::kLinear: {
        const Eigen::Vector3d start = rig.base - Eigen::Vector3d(rig.travel / 2.0, 0.0, 0.0);
        center = start + Eigen::Vector3d(s * rig.travel, 0.0, 0.0);
        break;
      }
      case TrajectoryMode::kArc: {
        const double theta = rig.travel / rig.distance;  // subtended angle, same arc length
        const double phi = (s - 0.5) * theta;
        center = rig.centroid +
                 rig.distance * Eigen::Vector3d(std::sin(phi), 0.0, -std::cos(phi));
        break;
      }
      case TrajectoryMode::kSnake:
        center = snake_center(spec, s);
        break;
    }
    scene.poses.poses.push_back(look_at(center, rig.centroid));
  }

  // Every pose must keep the cloud centroid in frame.
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : cloud.positions) centroid += p;
  centroid /= static_cast<double>(cloud.size());
  for (const Pose& pose : scene.poses.poses) {
    const ProjectedPoint proj = project_point(scene.poses.intrinsics, pose, centroid);
    if (proj.pixel.x() < 0 || proj.pixel.x() >= spec.width || proj.pixel.y() < 0 ||
        proj.pixel.y() >= spec.height) {
      throw InvalidSpec("trajectory does not keep the scene in frame");
    }
  }
  return scene;
}

DatasetBundle build_dataset(const SceneSpec& spec) {
  DatasetBundle bundle;
  bundle.spec = spec;
  SynthScene scene = build_scene(spec);
  bundle.cloud = std::move(scene.cloud);
  bundle.poses = std::move(scene.poses);

  bundle.frames = render_views(bundle.cloud, bundle.poses, spec.height, spec.width);
  for (ImagePlane& frame : bundle.frames) frame.quantize_to_f32();

  bundle.masks = generate_masks(spec.height, spec.width, spec.compression_ratio,
                                spec.overlap_ratio, detail::mix64(spec.seed ^ 0x6d61736bull));
  bundle.measurement = synthesize_measurement(bundle.frames, bundle.masks, spec.noise_sigma,
                                              detail::mix64(spec.seed ^ 0x6e6f6973ull));
  bundle.measurement.image.quantize_to_f32();
  return bundle;
}

}  // namespace scisplat
