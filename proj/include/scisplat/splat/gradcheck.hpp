// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scisplat/core/camera.hpp"
#include "scisplat/splat/cloud.hpp"

namespace scisplat {

struct GradCheckGroup {
  std::string name;
  double max_rel_error = 0.0;  // over parameters that are not jointly near zero
  double max_abs_error = 0.0;
  bool pass = true;
};

struct GradCheckReport {
  std::vector<GradCheckGroup> groups;
  double tolerance = 0.0;
  bool pass = true;

  std::string to_string() const;
};

/// Central-finite-difference verification of the analytic backward pass on a
/// small scene. The loss is 0.5 * sum of squared residuals against a seeded
/// random target per view; differences are taken in the stored
/// parameterization (raw quaternion components, log-scales, logits, pose
/// twists applied by left exponential). A parameter passes when the relative
/// error is within `tolerance` or both derivatives are below 1e-6.
///
/// Requires cloud size <= 50 and image <= 32x32 to keep the oracle tractable;
/// throws InvalidStep when step <= 0.
GradCheckReport finite_diff_check(const GaussianCloud& cloud, const PoseSet& poses, int height,
                                  int width, double step, double tolerance, std::uint64_t seed);

/// A seeded scene suited to difference checks: footprints cover the image so
/// no pixel sits near the contribution cutoff, opacities stay away from the
/// clamp, and depths are well separated.
void make_gradcheck_scene(std::uint64_t seed, int n_gaussians, int n_views, int height, int width,
                          GaussianCloud& cloud, PoseSet& poses);

}  // namespace scisplat
