// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

namespace scisplat {

enum class LossMode { kL1Dssim, kMse };
enum class DensifyMode { kMcmc, kAdc, kOff };

std::string to_string(LossMode mode);
std::string to_string(DensifyMode mode);
LossMode loss_mode_from_string(const std::string& s);
DensifyMode densify_mode_from_string(const std::string& s);

struct TrainConfig {
  int iterations = 3000;
  std::size_t max_gaussians = 100000;

  LossMode loss_mode = LossMode::kL1Dssim;
  double lambda_dssim = 0.2;
  double lambda_opacity = 1e-4;
  double lambda_scale = 1e-4;

  // Per-group Gaussian learning rates; multiplied by sqrt(frame count) when
  // scale_lr_by_sqrt_frames is set, matching the batched-views update rule.
  double lr_position = 2e-4;
  double lr_log_scale = 5e-3;
  double lr_rotation = 1e-3;
  double lr_opacity = 5e-2;
  double lr_color = 2.5e-2;
  bool scale_lr_by_sqrt_frames = true;
  // Exponential end/start ratio applied to every Gaussian group over the run;
  // damps the late-stage jitter of the L1 gradient.
  double gaussian_lr_decay = 0.02;

  // Pose schedule: exponential from start to end over the run.
  bool optimize_poses = true;
  double pose_lr_start = 5e-4;
  double pose_lr_end = 2.5e-7;

  DensifyMode densify_mode = DensifyMode::kMcmc;
  int densify_interval = 250;
  double densify_stop_fraction = 0.7;  // no densification in the last stretch
  double dead_opacity = 0.005;
  double growth_fraction = 0.05;
  double position_noise_coeff = 0.1;

  // Clone/split ablation arm.
  double adc_grad_threshold = 5e-6;
  double adc_split_scale = 0.02;

  std::uint64_t seed = 0;

  /// Exponential pose learning rate at a 0-based iteration.
  double pose_lr_at(int iteration) const;

  /// Decay multiplier for the Gaussian learning rates at a 0-based iteration.
  double gaussian_lr_decay_at(int iteration) const;
};

/// Multiplier applied to the Gaussian learning rates when a whole frame stack
/// is batched into every update: sqrt of the frame count.
double gaussian_lr_scale(int n_frames, bool enabled);

/// FNV-1a over the canonical JSON form; stored in checkpoints.
std::uint64_t config_hash(const TrainConfig& config);

}  // namespace scisplat
