// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "scisplat/core/parallel.hpp"
#include "scisplat/core/rng.hpp"
#include "scisplat/init/seed.hpp"
#include "scisplat/splat/render.hpp"
#include "support/oracles.hpp"

using namespace scisplat;

namespace {

// Mixed-size scene: some splats cover a few pixels, some many, some culled.
GaussianCloud random_scene(std::uint64_t seed, int count) {
  Rng rng(seed);
  GaussianCloud cloud;
  cloud.resize(count);
  for (int i = 0; i < count; ++i) {
    cloud.positions[i] = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(1.0, 3.0)};
    for (int k = 0; k < 3; ++k) {
      cloud.log_scales[i][k] = std::log(rng.uniform(0.01, 0.3));
    }
    Eigen::Vector4d q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    cloud.rotations[i] = q.normalized();
    cloud.opacity_logits[i] = logit(rng.uniform(0.05, 0.95));
    cloud.color_logits[i] = {logit(rng.uniform(0.05, 0.95)), logit(rng.uniform(0.05, 0.95)),
                             logit(rng.uniform(0.05, 0.95))};
  }
  return cloud;
}

const Intrinsics kTestIntrinsics{32.0, 32.0, 16.0, 16.0};

}  // namespace

TEST_CASE("covariance from unit scales and identity rotation is the identity") {
  const Eigen::Matrix3d sigma =
      covariance_from_scale_rotation(Eigen::Vector3d::Zero(), {1, 0, 0, 0});
  CHECK((sigma - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("a 90-degree z rotation permutes the squared scales") {
  const Eigen::Vector3d log_scale(std::log(1.0), std::log(2.0), std::log(3.0));
  const double half = std::sqrt(0.5);
  const Eigen::Matrix3d sigma =
      covariance_from_scale_rotation(log_scale, {half, 0, 0, half});  // 90 deg about z
  Eigen::Matrix3d expected = Eigen::Vector3d(4.0, 1.0, 9.0).asDiagonal();
  CHECK((sigma - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("covariances are symmetric positive definite for random inputs") {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector3d log_scale(rng.uniform(-3.0, 1.0), rng.uniform(-3.0, 1.0),
                                    rng.uniform(-3.0, 1.0));
    Eigen::Vector4d q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    const Eigen::Matrix3d sigma = covariance_from_scale_rotation(log_scale, q.normalized());
    CHECK((sigma - sigma.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(sigma);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("on-axis isotropic projection matches the closed-form Jacobian") {
  const double s = 0.05, z = 2.0, f = 32.0;
  const auto proj = project_gaussian({0, 0, z}, Eigen::Vector3d::Constant(std::log(s)),
                                     {1, 0, 0, 0}, 0.8, Pose::identity(), kTestIntrinsics);
  REQUIRE(proj.has_value());
  const double expected = (f * s / z) * (f * s / z);
  CHECK(proj->cov2d(0, 0) == doctest::Approx(expected + kBlurFloor).epsilon(1e-9));
  CHECK(proj->cov2d(1, 1) == doctest::Approx(expected + kBlurFloor).epsilon(1e-9));
  CHECK(std::abs(proj->cov2d(0, 1)) < 1e-12);
  CHECK(proj->depth == doctest::Approx(z));
}

TEST_CASE("doubling fx doubles the pre-floor footprint width") {
  const double s = 0.05, z = 2.0;
  Intrinsics k1{32.0, 32.0, 16.0, 16.0};
  Intrinsics k2{64.0, 32.0, 16.0, 16.0};
  const auto p1 = project_gaussian({0, 0, z}, Eigen::Vector3d::Constant(std::log(s)),
                                   {1, 0, 0, 0}, 0.8, Pose::identity(), k1);
  const auto p2 = project_gaussian({0, 0, z}, Eigen::Vector3d::Constant(std::log(s)),
                                   {1, 0, 0, 0}, 0.8, Pose::identity(), k2);
  REQUIRE(p1.has_value());
  REQUIRE(p2.has_value());
  const double w1 = std::sqrt(p1->cov2d(0, 0) - kBlurFloor);
  const double w2 = std::sqrt(p2->cov2d(0, 0) - kBlurFloor);
  CHECK(w2 == doctest::Approx(2.0 * w1).epsilon(1e-9));
}

TEST_CASE("Gaussians behind the near clip are culled") {
  for (double z : {0.0, -1.0, 0.005}) {
    const auto proj = project_gaussian({0, 0, z}, Eigen::Vector3d::Constant(std::log(0.05)),
                                       {1, 0, 0, 0}, 0.8, Pose::identity(), kTestIntrinsics);
    CHECK_FALSE(proj.has_value());
  }
}

TEST_CASE("near-transparent Gaussians are culled outright") {
  const auto proj = project_gaussian({0, 0, 2.0}, Eigen::Vector3d::Constant(std::log(0.05)),
                                     {1, 0, 0, 0}, 1.0 / 300.0, Pose::identity(), kTestIntrinsics);
  CHECK_FALSE(proj.has_value());
}

TEST_CASE("empty cloud renders black") {
  const RenderResult r = rasterize(GaussianCloud{}, Pose::identity(), kTestIntrinsics, 8, 8);
  for (double v : r.image.data) CHECK(v == 0.0);
  for (double t : r.aux.final_transmittance) CHECK(t == 1.0);
}

TEST_CASE("all-transparent cloud renders black") {
  GaussianCloud cloud = random_scene(4, 10);
  for (double& o : cloud.opacity_logits) o = logit(1e-6);
  const RenderResult r = rasterize(cloud, Pose::identity(), kTestIntrinsics, 16, 16);
  for (double v : r.image.data) CHECK(v == 0.0);
}

TEST_CASE("one opaque on-axis Gaussian composites c * alpha at its center pixel") {
  GaussianCloud cloud;
  cloud.resize(1);
  cloud.positions[0] = {0.0, 0.0, 2.0};
  cloud.log_scales[0] = Eigen::Vector3d::Constant(std::log(0.2));
  cloud.opacity_logits[0] = logit(0.7);
  cloud.color_logits[0] = {logit(0.8), logit(0.3), logit(0.6)};
  // Odd image: the principal point (4.5, 4.5) is exactly a pixel center.
  const Intrinsics k{9.0, 9.0, 4.5, 4.5};
  const RenderResult r = rasterize(cloud, Pose::identity(), k, 9, 9);
  const double alpha = cloud.opacity(0);  // falloff is exp(0) at the center
  for (int c = 0; c < 3; ++c) {
    CHECK(r.image.at(4, 4, c) == doctest::Approx(cloud.color(0)[c] * alpha).epsilon(1e-12));
  }
}

TEST_CASE("a nearly opaque front Gaussian hides the one behind") {
  GaussianCloud cloud;
  cloud.resize(2);
  cloud.positions[0] = {0.0, 0.0, 1.5};  // red, in front
  cloud.positions[1] = {0.0, 0.0, 2.5};  // blue, behind
  for (int i = 0; i < 2; ++i) {
    cloud.log_scales[i] = Eigen::Vector3d::Constant(std::log(0.8));
    cloud.rotations[i] = {1, 0, 0, 0};
  }
  cloud.opacity_logits[0] = logit(0.99999);  // clamps to 0.999 in compositing
  cloud.opacity_logits[1] = logit(0.9);
  cloud.color_logits[0] = {logit(0.95), logit(0.02), logit(0.02)};
  cloud.color_logits[1] = {logit(0.02), logit(0.02), logit(0.95)};
  const Intrinsics k{9.0, 9.0, 4.5, 4.5};
  const RenderResult r = rasterize(cloud, Pose::identity(), k, 9, 9);
  // With the front alpha clamped at 0.999, the pixel is within 1e-3 of the
  // front color: the occluded one can contribute at most the residual 0.001.
  for (int c = 0; c < 3; ++c) {
    CHECK(std::abs(r.image.at(4, 4, c) - 0.999 * cloud.color(0)[c]) < 1e-3);
  }
}

TEST_CASE("tiled rasterization equals the per-pixel reference") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GaussianCloud cloud = random_scene(seed * 31 + 1, 40);
    Twist xi;
    Rng rng(seed);
    for (int k = 0; k < 6; ++k) xi[k] = 0.05 * rng.normal();
    const Pose pose = se3_exp(xi);
    const RenderResult r = rasterize(cloud, pose, kTestIntrinsics, 33, 47);  // ragged tiles
    const ImagePlane oracle = testing::reference_composite(r.aux);
    double worst = 0.0;
    for (std::size_t k = 0; k < oracle.data.size(); ++k) {
      worst = std::max(worst, std::abs(oracle.data[k] - r.image.data[k]));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("output is invariant under permutation of the input order") {
  const GaussianCloud cloud = random_scene(77, 30);
  const RenderResult base = rasterize(cloud, Pose::identity(), kTestIntrinsics, 32, 32);

  GaussianCloud shuffled;
  shuffled.resize(cloud.size());
  std::vector<std::size_t> perm(cloud.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(5);
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.uniform_int(i)]);
  }
  for (std::size_t i = 0; i < perm.size(); ++i) {
    shuffled.positions[i] = cloud.positions[perm[i]];
    shuffled.log_scales[i] = cloud.log_scales[perm[i]];
    shuffled.rotations[i] = cloud.rotations[perm[i]];
    shuffled.opacity_logits[i] = cloud.opacity_logits[perm[i]];
    shuffled.color_logits[i] = cloud.color_logits[perm[i]];
  }
  const RenderResult again = rasterize(shuffled, Pose::identity(), kTestIntrinsics, 32, 32);
  CHECK(base.image.data == again.image.data);
}

TEST_CASE("per-pixel transmittance stays in [0,1] and bounds the output") {
  const GaussianCloud cloud = random_scene(15, 60);
  const RenderResult r = rasterize(cloud, Pose::identity(), kTestIntrinsics, 32, 32);
  for (std::size_t p = 0; p < r.aux.final_transmittance.size(); ++p) {
    const double t = r.aux.final_transmittance[p];
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
    for (int c = 0; c < 3; ++c) {
      // Sum of compositing weights is 1 - T; colors are < 1.
      CHECK(r.image.data[p * 3 + c] <= 1.0 - t + 1e-12);
    }
  }
}

TEST_CASE("render_views maps poses to frames deterministically") {
  const GaussianCloud cloud = random_scene(8, 20);
  PoseSet poses;
  poses.intrinsics = kTestIntrinsics;
  Pose end;
  end.translation = {0.05, 0.0, 0.0};
  poses = spline_poses(Pose::identity(), end, 8, kTestIntrinsics);
  const auto frames = render_views(cloud, poses, 24, 24);
  REQUIRE(frames.size() == 8);

  PoseSet twice;
  twice.intrinsics = kTestIntrinsics;
  twice.poses = {poses.poses[3], poses.poses[3]};
  const auto identical = render_views(cloud, twice, 24, 24);
  CHECK(identical[0].data == identical[1].data);

  const RenderResult single = rasterize(cloud, poses.poses[0], kTestIntrinsics, 24, 24);
  CHECK(frames[0].data == single.image.data);
}

TEST_CASE("rendering is bit-identical across thread counts") {
  const GaussianCloud cloud = random_scene(21, 50);
  set_thread_limit(1);
  const RenderResult serial = rasterize(cloud, Pose::identity(), kTestIntrinsics, 48, 48);
  set_thread_limit(4);
  const RenderResult parallel = rasterize(cloud, Pose::identity(), kTestIntrinsics, 48, 48);
  set_thread_limit(0);
  CHECK(serial.image.data == parallel.image.data);
  CHECK(serial.aux.final_transmittance == parallel.aux.final_transmittance);
}
