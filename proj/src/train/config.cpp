// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/train/config.hpp"

#include <cmath>

#include "scisplat/core/errors.hpp"

namespace scisplat {

double gaussian_lr_scale(int n_frames, bool enabled) {
  return enabled ? std::sqrt(static_cast<double>(n_frames)) : 1.0;
}

std::string to_string(LossMode mode) {
  return mode == LossMode::kMse ? "mse" : "l1_dssim";
}

std::string to_string(DensifyMode mode) {
  switch (mode) {
    case DensifyMode::kMcmc: return "mcmc";
    case DensifyMode::kAdc: return "adc";
    case DensifyMode::kOff: return "off";
  }
  return "mcmc";
}

LossMode loss_mode_from_string(const std::string& s) {
  if (s == "mse") return LossMode::kMse;
  if (s == "l1_dssim") return LossMode::kL1Dssim;
  throw InvalidSpec("unknown loss mode: " + s);
}

DensifyMode densify_mode_from_string(const std::string& s) {
  if (s == "mcmc") return DensifyMode::kMcmc;
  if (s == "adc") return DensifyMode::kAdc;
  if (s == "off") return DensifyMode::kOff;
  throw InvalidSpec("unknown densify mode: " + s);
}

}  // namespace scisplat
