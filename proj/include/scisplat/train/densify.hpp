// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "scisplat/train/trainer.hpp"

namespace scisplat {

struct DensifyStats {
  int relocated = 0;
  int added = 0;
  int pruned = 0;
};

/// Relocation of dead Gaussians onto opacity-weighted targets plus capped
/// growth, both with the opacity/scale redistribution that keeps the rendered
/// image unchanged up to tolerance. Deterministic per (state.seed, iteration).
DensifyStats mcmc_relocate_and_grow(TrainState& state, const TrainConfig& config,
                                    std::uint64_t iteration);

/// Seeded position noise scaled by the position learning rate and (1 - o).
void mcmc_position_noise(TrainState& state, const TrainConfig& config, double lr_position,
                         std::uint64_t iteration);

/// Clone/split ablation arm driven by accumulated screen-space gradients.
DensifyStats adc_densify(TrainState& state, const TrainConfig& config, std::uint64_t iteration);

}  // namespace scisplat
