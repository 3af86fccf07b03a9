// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "scisplat/core/camera.hpp"
#include "scisplat/sci/measurement.hpp"
#include "scisplat/splat/cloud.hpp"
#include "scisplat/train/adam.hpp"
#include "scisplat/train/config.hpp"

namespace scisplat {

/// Everything the optimizer carries between iterations.
struct TrainState {
  GaussianCloud cloud;
  PoseSet poses;

  AdamState adam_positions;   // 3 per Gaussian
  AdamState adam_log_scales;  // 3 per Gaussian
  AdamState adam_rotations;   // 4 per Gaussian
  AdamState adam_opacities;   // 1 per Gaussian
  AdamState adam_colors;      // 3 per Gaussian
  AdamState adam_poses;       // 6 per frame

  int iteration = 0;
  std::uint64_t seed = 0;
  std::vector<double> loss_history;

  // Densification bookkeeping: accumulated screen-gradient norms since the
  // last event (drives the clone/split ablation arm).
  std::vector<double> grad_norm_accum;
  std::vector<std::int64_t> grad_event_count;

  void reset_gaussian_moments(std::size_t index);
  void append_gaussian_moment_rows(std::size_t count);
  void reset_densify_stats();
};

TrainState make_initial_state(GaussianCloud cloud, PoseSet poses, const TrainConfig& config);

/// Observer around densification, used by the acceptance suite to verify the
/// appearance-preservation property of each event. Phases: 0 = before
/// relocation/growth, 1 = after relocation/growth (before position noise).
using DensifyObserver = std::function<void(const TrainState&, int phase)>;

/// The joint scene/pose loop: render the frame stack, synthesize the
/// measurement, apply the measurement loss plus regularizers, run the
/// analytic backward pass, take Adam steps, densify periodically. Returns the
/// final state with loss history. Throws Diverged on non-finite loss.
TrainState train(const Measurement& measurement, const MaskStack& masks, GaussianCloud init_cloud,
                 PoseSet init_poses, const TrainConfig& config,
                 const DensifyObserver& observer = nullptr);

/// One composed loss evaluation (no parameter update); used for reporting.
double evaluate_measurement_loss(const TrainState& state, const Measurement& measurement,
                                 const MaskStack& masks, const TrainConfig& config);

}  // namespace scisplat
