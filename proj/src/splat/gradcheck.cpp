// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/splat/gradcheck.hpp"

#include <cmath>
#include <sstream>

#include "scisplat/core/errors.hpp"
#include "scisplat/core/rng.hpp"
#include "scisplat/splat/backward.hpp"
#include "scisplat/splat/render.hpp"

namespace scisplat {

namespace {

std::vector<ImagePlane> make_targets(std::uint64_t seed, std::size_t n_views, int h, int w) {
  Rng rng(detail::mix64(seed ^ 0x7a6765747354ull));
  std::vector<ImagePlane> targets;
  targets.reserve(n_views);
  for (std::size_t v = 0; v < n_views; ++v) {
    ImagePlane img(h, w, 3);
    for (double& value : img.data) value = rng.uniform();
    targets.push_back(std::move(img));
  }
  return targets;
}

double loss_value(const GaussianCloud& cloud, const PoseSet& poses, int h, int w,
                  const std::vector<ImagePlane>& targets) {
  double loss = 0.0;
  for (std::size_t v = 0; v < poses.poses.size(); ++v) {
    const RenderResult r = rasterize(cloud, poses.poses[v], poses.intrinsics, h, w);
    for (std::size_t k = 0; k < r.image.data.size(); ++k) {
      const double d = r.image.data[k] - targets[v].data[k];
      loss += 0.5 * d * d;
    }
  }
  return loss;
}

struct GroupTracker {
  GradCheckGroup group;
  void record(double analytic, double numeric, double tolerance) {
    const double abs_err = std::abs(analytic - numeric);
    group.max_abs_error = std::max(group.max_abs_error, abs_err);
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    if (scale < 1e-6) return;  // both near zero: absolute criterion
    const double rel = abs_err / scale;
    group.max_rel_error = std::max(group.max_rel_error, rel);
    if (rel > tolerance && abs_err > 1e-6) group.pass = false;
  }
};

}  // namespace

std::string GradCheckReport::to_string() const {
  std::ostringstream out;
  for (const GradCheckGroup& g : groups) {
    out << (g.pass ? "PASS" : "FAIL") << "  " << g.name << "  max_rel=" << g.max_rel_error
        << "  max_abs=" << g.max_abs_error << "\n";
  }
  out << (pass ? "all gradient groups within tolerance " : "gradient check FAILED at tolerance ")
      << tolerance << "\n";
  return out.str();
}

GradCheckReport finite_diff_check(const GaussianCloud& cloud, const PoseSet& poses, int height,
                                  int width, double step, double tolerance, std::uint64_t seed) {
  if (step <= 0.0) throw InvalidStep("finite-difference step must be positive");
  if (cloud.size() > 50 || height > 32 || width > 32) {
    throw InvalidSpec("finite_diff_check is limited to <= 50 Gaussians and <= 32x32 images");
  }

  const std::vector<ImagePlane> targets = make_targets(seed, poses.poses.size(), height, width);

  // Analytic gradients.
  std::vector<ImagePlane> upstream;
  std::vector<RasterAux> auxes;
  for (std::size_t v = 0; v < poses.poses.size(); ++v) {
    RenderResult r = rasterize(cloud, poses.poses[v], poses.intrinsics, height, width);
    ImagePlane g(height, width, 3);
    for (std::size_t k = 0; k < g.data.size(); ++k) {
      g.data[k] = r.image.data[k] - targets[v].data[k];
    }
    upstream.push_back(std::move(g));
    auxes.push_back(std::move(r.aux));
  }
  const auto [cloud_grads, pose_grads] = backward(cloud, poses, upstream, auxes);

  auto numeric_cloud = [&](auto&& mutate) {
    GaussianCloud probe = cloud;
    mutate(probe, +step);
    const double above = loss_value(probe, poses, height, width, targets);
    probe = cloud;
    mutate(probe, -step);
    const double below = loss_value(probe, poses, height, width, targets);
    return (above - below) / (2.0 * step);
  };

  GroupTracker positions, log_scales, rotations, opacities, colors, pose_group;
  positions.group.name = "position";
  log_scales.group.name = "log_scale";
  rotations.group.name = "rotation";
  opacities.group.name = "opacity_logit";
  colors.group.name = "color_logit";
  pose_group.group.name = "pose_twist";

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      positions.record(cloud_grads.positions[i][k],
                       numeric_cloud([&](GaussianCloud& c, double h) { c.positions[i][k] += h; }),
                       tolerance);
      log_scales.record(cloud_grads.log_scales[i][k],
                        numeric_cloud([&](GaussianCloud& c, double h) { c.log_scales[i][k] += h; }),
                        tolerance);
      colors.record(cloud_grads.color_logits[i][k],
                    numeric_cloud([&](GaussianCloud& c, double h) { c.color_logits[i][k] += h; }),
                    tolerance);
    }
    for (int k = 0; k < 4; ++k) {
      rotations.record(cloud_grads.rotations[i][k],
                       numeric_cloud([&](GaussianCloud& c, double h) { c.rotations[i][k] += h; }),
                       tolerance);
    }
    opacities.record(
        cloud_grads.opacity_logits[i],
        numeric_cloud([&](GaussianCloud& c, double h) { c.opacity_logits[i] += h; }), tolerance);
  }

  for (std::size_t v = 0; v < poses.poses.size(); ++v) {
    for (int k = 0; k < 6; ++k) {
      Twist delta = Twist::Zero();
      delta[k] = step;
      PoseSet above = poses;
      above.poses[v] = se3_exp(delta).compose(poses.poses[v]);
      PoseSet below = poses;
      below.poses[v] = se3_exp(-delta).compose(poses.poses[v]);
      const double numeric = (loss_value(cloud, above, height, width, targets) -
                              loss_value(cloud, below, height, width, targets)) /
                             (2.0 * step);
      pose_group.record(pose_grads.twists[v][k], numeric, tolerance);
    }
  }

  GradCheckReport report;
  report.tolerance = tolerance;
  report.groups = {positions.group, log_scales.group, rotations.group,
                   opacities.group, colors.group, pose_group.group};
  report.pass = true;
  for (const GradCheckGroup& g : report.groups) report.pass = report.pass && g.pass;
  return report;
}

void make_gradcheck_scene(std::uint64_t seed, int n_gaussians, int n_views, int height, int width,
                          GaussianCloud& cloud, PoseSet& poses) {
  Rng rng(seed);
  poses.intrinsics = {static_cast<double>(width), static_cast<double>(width), width / 2.0,
                      height / 2.0};

  cloud = GaussianCloud();
  cloud.resize(n_gaussians);
  for (int i = 0; i < n_gaussians; ++i) {
    // Depths separated well beyond the difference step so the compositing
    // order cannot flip between evaluations.
    const double z = 1.8 + 0.06 * i + 0.02 * rng.uniform();
    cloud.positions[i] = {rng.uniform(-0.25, 0.25), rng.uniform(-0.25, 0.25), z};
    // Footprints wide enough to keep every image pixel above the skip
    // threshold, so differences never cross the cutoff.
    const double scale = rng.uniform(1.1, 1.5) * z / width * 10.0;
    for (int k = 0; k < 3; ++k) {
      cloud.log_scales[i][k] = std::log(scale * rng.uniform(0.9, 1.2));
    }
    Eigen::Vector4d q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    cloud.rotations[i] = q.normalized();
    cloud.opacity_logits[i] = logit(rng.uniform(0.25, 0.75));
    cloud.color_logits[i] = {logit(rng.uniform(0.2, 0.8)), logit(rng.uniform(0.2, 0.8)),
                             logit(rng.uniform(0.2, 0.8))};
  }

  poses.poses.clear();
  for (int v = 0; v < n_views; ++v) {
    Twist xi;
    for (int k = 0; k < 3; ++k) xi[k] = 0.02 * rng.normal();
    for (int k = 3; k < 6; ++k) xi[k] = 0.02 * rng.normal();
    poses.poses.push_back(se3_exp(xi));
  }
}

}  // namespace scisplat
