// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0
//
// JSON file formats: dataset manifest, scene spec, training config, pose and
// point imports, plus the checkpoint directory layout.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scisplat/core/camera.hpp"
#include "scisplat/init/seed.hpp"
#include "scisplat/scene/synth.hpp"
#include "scisplat/train/config.hpp"

namespace scisplat {

/// Paths inside a manifest are relative to the manifest's directory.
struct Manifest {
  int version = 1;
  int height = 0;
  int width = 0;
  int channels = 3;
  int compression_ratio = 0;
  double overlap_ratio = 1.0;
  double tau = 1.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  Intrinsics intrinsics;
  double scene_extent = 1.0;
  std::string measurement_file;
  std::string masks_file;
  std::vector<std::string> gt_frame_files;
  std::string gt_poses_file;   // empty when absent
  std::string gt_cloud_dir;    // empty when absent
};

void write_manifest(const std::string& path, const Manifest& manifest);
Manifest read_manifest(const std::string& path);

/// Full dataset write/load. Loading validates shapes and, when ground-truth
/// frames are present and sigma is zero, re-synthesizes the measurement and
/// checks it byte-exactly.
void write_dataset(const DatasetBundle& bundle, const std::string& directory);
struct LoadedDataset {
  Manifest manifest;
  Measurement measurement;
  MaskStack masks;
  std::vector<ImagePlane> gt_frames;  // may be empty
  std::optional<PoseSet> gt_poses;
  std::optional<GaussianCloud> gt_cloud;
};
LoadedDataset load_dataset(const std::string& manifest_path);

// Pose files: JSON array of {frame_index, rotation (9 row-major), translation}.
void write_poses_json(const std::string& path, const std::vector<Pose>& poses);
std::vector<Pose> read_poses_json(const std::string& path);

// Point files: JSON array of {xyz, rgb?}.
void write_points_json(const std::string& path, const SparsePoints& points);
SparsePoints read_points_json(const std::string& path);

SceneSpec read_scene_spec(const std::string& path);
void write_scene_spec(const std::string& path, const SceneSpec& spec);

TrainConfig read_train_config(const std::string& path);
void write_train_config(const std::string& path, const TrainConfig& config);

// Gaussian cloud directory: one SCIT tensor per attribute.
void write_cloud(const GaussianCloud& cloud, const std::string& directory);
GaussianCloud read_cloud(const std::string& directory);

/// Checkpoint: cloud tensors + poses + a JSON header carrying iteration,
/// seed, config hash and intrinsics.
struct Checkpoint {
  GaussianCloud cloud;
  PoseSet poses;
  int iteration = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  int height = 0;  // rendered image size
  int width = 0;
};
void write_checkpoint(const Checkpoint& checkpoint, const std::string& directory);
Checkpoint read_checkpoint(const std::string& directory);

}  // namespace scisplat
