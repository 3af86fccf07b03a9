// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0
//
// Procedural ground truth for desk-scale experiments: a known Gaussian scene,
// a camera trajectory that keeps it in frame, rendered frames, and the paired
// compressed capture. Reconstruction quality is judged against these.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scisplat/core/camera.hpp"
#include "scisplat/metrics/metrics.hpp"
#include "scisplat/sci/measurement.hpp"
#include "scisplat/splat/cloud.hpp"

namespace scisplat {

enum class PaletteMode { kRandom, kGradient, kChecker };
enum class TrajectoryMode { kLinear, kArc, kSnake };

std::string to_string(PaletteMode mode);
std::string to_string(TrajectoryMode mode);
PaletteMode palette_mode_from_string(const std::string& s);
TrajectoryMode trajectory_mode_from_string(const std::string& s);

struct SceneSpec {
  int gaussian_count = 81;
  Eigen::Vector3d box_min{-0.5, -0.5, -0.1};
  Eigen::Vector3d box_max{0.5, 0.5, 0.1};
  PaletteMode palette = PaletteMode::kChecker;
  TrajectoryMode trajectory = TrajectoryMode::kLinear;
  int height = 64;
  int width = 64;
  int compression_ratio = 8;
  double overlap_ratio = 0.25;
  double noise_sigma = 0.0;
  // Camera translation over the exposure, as a fraction of the scene extent
  // (short-exposure captures move little).
  double trajectory_extent_fraction = 0.05;
  double snake_periods = 2.0;
  std::uint64_t seed = 0;
};

struct SynthScene {
  GaussianCloud cloud;
  PoseSet poses;  // one per compressed frame
};

/// Deterministic per seed. Every pose sees the cloud centroid inside the
/// image (InvalidSpec otherwise). Snake trajectories place camera centers on
/// an exact closed-form sinusoid.
SynthScene build_scene(const SceneSpec& spec);

/// Closed-form camera center for snake trajectories at parameter
/// s = (i-1)/(N-1); exposed so tests can check positions independently.
Eigen::Vector3d snake_center(const SceneSpec& spec, double s);

struct DatasetBundle {
  SceneSpec spec;
  std::vector<ImagePlane> frames;  // rendered ground truth, f32-quantized
  MaskStack masks;
  Measurement measurement;
  PoseSet poses;
  GaussianCloud cloud;
};

/// Renders the ground-truth frames, generates masks, synthesizes the
/// measurement. Frames are quantized to f32 before synthesis so re-encoding
/// the stored files reproduces the stored measurement bit-exactly (sigma 0).
DatasetBundle build_dataset(const SceneSpec& spec);

}  // namespace scisplat
