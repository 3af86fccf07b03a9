// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "scisplat/core/errors.hpp"
#include "scisplat/core/parallel.hpp"
#include "scisplat/core/rng.hpp"
#include "scisplat/splat/backward.hpp"
#include "scisplat/splat/gradcheck.hpp"
#include "scisplat/splat/render.hpp"

using namespace scisplat;

TEST_CASE("zero upstream gradient produces zero gradients everywhere") {
  GaussianCloud cloud;
  PoseSet poses;
  make_gradcheck_scene(3, 6, 2, 16, 16, cloud, poses);
  std::vector<ImagePlane> upstream;
  std::vector<RasterAux> auxes;
  for (const Pose& pose : poses.poses) {
    RenderResult r = rasterize(cloud, pose, poses.intrinsics, 16, 16);
    upstream.emplace_back(16, 16, 3, 0.0);
    auxes.push_back(std::move(r.aux));
  }
  const auto [grads, pose_grads] = backward(cloud, poses, upstream, auxes);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(grads.positions[i].norm() == 0.0);
    CHECK(grads.log_scales[i].norm() == 0.0);
    CHECK(grads.rotations[i].norm() == 0.0);
    CHECK(grads.opacity_logits[i] == 0.0);
    CHECK(grads.color_logits[i].norm() == 0.0);
  }
  for (const Twist& t : pose_grads.twists) CHECK(t.norm() == 0.0);
}

TEST_CASE("backward is linear in the upstream gradient") {
  GaussianCloud cloud;
  PoseSet poses;
  make_gradcheck_scene(11, 5, 1, 16, 16, cloud, poses);
  RenderResult r = rasterize(cloud, poses.poses[0], poses.intrinsics, 16, 16);

  ImagePlane u1(16, 16, 3), u2(16, 16, 3), sum(16, 16, 3);
  Rng rng(4);
  for (std::size_t k = 0; k < u1.data.size(); ++k) {
    u1.data[k] = rng.normal();
    u2.data[k] = rng.normal();
    sum.data[k] = u1.data[k] + u2.data[k];
  }

  CloudGradients g1, g2, gs;
  g1.resize(cloud.size());
  g2.resize(cloud.size());
  gs.resize(cloud.size());
  Twist t1 = Twist::Zero(), t2 = Twist::Zero(), ts = Twist::Zero();
  backward_view(cloud, poses.poses[0], poses.intrinsics, u1, r.aux, g1, t1);
  backward_view(cloud, poses.poses[0], poses.intrinsics, u2, r.aux, g2, t2);
  backward_view(cloud, poses.poses[0], poses.intrinsics, sum, r.aux, gs, ts);

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK((gs.positions[i] - g1.positions[i] - g2.positions[i]).norm() <
          1e-9 * (1.0 + gs.positions[i].norm()));
    CHECK(std::abs(gs.opacity_logits[i] - g1.opacity_logits[i] - g2.opacity_logits[i]) <
          1e-9 * (1.0 + std::abs(gs.opacity_logits[i])));
  }
  CHECK((ts - t1 - t2).norm() < 1e-9 * (1.0 + ts.norm()));
}

TEST_CASE("Gaussians at the skip threshold receive zero gradient") {
  GaussianCloud cloud;
  cloud.resize(1);
  cloud.positions[0] = {0.0, 0.0, 2.0};
  cloud.log_scales[0] = Eigen::Vector3d::Constant(std::log(0.5));
  cloud.opacity_logits[0] = logit(1.0 / 255.0);  // alpha <= skip threshold everywhere
  cloud.color_logits[0] = {0.0, 0.0, 0.0};
  PoseSet poses;
  poses.intrinsics = {16.0, 16.0, 8.0, 8.0};
  poses.poses = {Pose::identity()};
  RenderResult r = rasterize(cloud, poses.poses[0], poses.intrinsics, 16, 16);
  ImagePlane upstream(16, 16, 3, 1.0);
  const auto [grads, pose_grads] = backward(cloud, poses, {upstream}, {r.aux});
  CHECK(grads.positions[0].norm() == 0.0);
  CHECK(grads.opacity_logits[0] == 0.0);
  CHECK(grads.contrib_counts[0] == 0);
}

TEST_CASE("x-symmetric scene with a symmetric loss has no x position gradient") {
  GaussianCloud cloud;
  cloud.resize(1);
  cloud.positions[0] = {0.0, 0.0, 2.0};
  cloud.log_scales[0] = Eigen::Vector3d::Constant(std::log(0.4));
  cloud.opacity_logits[0] = logit(0.6);
  cloud.color_logits[0] = {logit(0.7), logit(0.4), logit(0.5)};
  PoseSet poses;
  poses.intrinsics = {16.0, 16.0, 8.0, 8.0};
  poses.poses = {Pose::identity()};
  RenderResult r = rasterize(cloud, poses.poses[0], poses.intrinsics, 16, 16);
  // Constant target: upstream = C - 0.3 is symmetric in x about the center.
  ImagePlane upstream = r.image;
  for (double& v : upstream.data) v -= 0.3;
  const auto [grads, pose_grads] = backward(cloud, poses, {upstream}, {r.aux});
  CHECK(std::abs(grads.positions[0].x()) < 1e-8);
}

TEST_CASE("analytic position gradient sign matches a forward difference") {
  GaussianCloud cloud;
  PoseSet poses;
  make_gradcheck_scene(17, 1, 1, 16, 16, cloud, poses);
  const GradCheckReport report = finite_diff_check(cloud, poses, 16, 16, 1e-4, 1e-3, 17);
  CHECK(report.pass);
}

TEST_CASE("finite differences confirm every parameter group on seeded scenes") {
  for (std::uint64_t seed : {101ull, 202ull}) {
    GaussianCloud cloud;
    PoseSet poses;
    make_gradcheck_scene(seed, 5, 2, 16, 16, cloud, poses);
    const GradCheckReport report = finite_diff_check(cloud, poses, 16, 16, 1e-4, 1e-3, seed);
    INFO(report.to_string());
    CHECK(report.pass);
  }
}

TEST_CASE("stale aux records are rejected") {
  GaussianCloud cloud;
  PoseSet poses;
  make_gradcheck_scene(5, 3, 1, 16, 16, cloud, poses);
  RenderResult r = rasterize(cloud, poses.poses[0], poses.intrinsics, 16, 16);
  cloud.revision += 1;  // any mutation invalidates the records
  CloudGradients grads;
  grads.resize(cloud.size());
  Twist tw = Twist::Zero();
  ImagePlane upstream(16, 16, 3, 1.0);
  CHECK_THROWS_AS(backward_view(cloud, poses.poses[0], poses.intrinsics, upstream, r.aux, grads, tw),
                  StaleAux);
}

TEST_CASE("zero step is rejected by the harness") {
  GaussianCloud cloud;
  PoseSet poses;
  make_gradcheck_scene(5, 3, 1, 16, 16, cloud, poses);
  CHECK_THROWS_AS(finite_diff_check(cloud, poses, 16, 16, 0.0, 1e-3, 5), InvalidStep);
}

TEST_CASE("oversized scenes are rejected by the harness") {
  GaussianCloud cloud;
  PoseSet poses;
  make_gradcheck_scene(5, 3, 1, 16, 16, cloud, poses);
  CHECK_THROWS_AS(finite_diff_check(cloud, poses, 64, 64, 1e-4, 1e-3, 5), InvalidSpec);
}

TEST_CASE("backward is bit-identical across thread counts") {
  GaussianCloud cloud;
  PoseSet poses;
  make_gradcheck_scene(31, 8, 1, 16, 16, cloud, poses);
  RenderResult r = rasterize(cloud, poses.poses[0], poses.intrinsics, 16, 16);
  ImagePlane upstream(16, 16, 3);
  Rng rng(2);
  for (double& v : upstream.data) v = rng.normal();

  auto run = [&](int threads) {
    set_thread_limit(threads);
    CloudGradients grads;
    grads.resize(cloud.size());
    Twist tw = Twist::Zero();
    backward_view(cloud, poses.poses[0], poses.intrinsics, upstream, r.aux, grads, tw);
    set_thread_limit(0);
    return std::make_pair(std::move(grads), tw);
  };
  const auto [g1, t1] = run(1);
  const auto [g4, t4] = run(4);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(g1.positions[i] == g4.positions[i]);
    CHECK(g1.rotations[i] == g4.rotations[i]);
    CHECK(g1.opacity_logits[i] == g4.opacity_logits[i]);
  }
  CHECK(t1 == t4);
}
