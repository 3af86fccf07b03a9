// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/splat/backward.hpp"

#include <cmath>

#include "scisplat/core/errors.hpp"
#include "scisplat/core/parallel.hpp"

namespace scisplat {

void CloudGradients::resize(std::size_t n) {
  positions.assign(n, Eigen::Vector3d::Zero());
  log_scales.assign(n, Eigen::Vector3d::Zero());
  rotations.assign(n, Eigen::Vector4d::Zero());
  opacity_logits.assign(n, 0.0);
  color_logits.assign(n, Eigen::Vector3d::Zero());
  contrib_counts.assign(n, 0);
  screen_grad_norm.assign(n, 0.0);
}

void CloudGradients::set_zero() {
  for (auto& v : positions) v.setZero();
  for (auto& v : log_scales) v.setZero();
  for (auto& v : rotations) v.setZero();
  for (auto& v : opacity_logits) v = 0.0;
  for (auto& v : color_logits) v.setZero();
  for (auto& v : contrib_counts) v = 0;
  for (auto& v : screen_grad_norm) v = 0.0;
}

bool CloudGradients::all_finite() const {
  for (const auto& v : positions) if (!v.allFinite()) return false;
  for (const auto& v : log_scales) if (!v.allFinite()) return false;
  for (const auto& v : rotations) if (!v.allFinite()) return false;
  for (double v : opacity_logits) if (!std::isfinite(v)) return false;
  for (const auto& v : color_logits) if (!v.allFinite()) return false;
  return true;
}

namespace {

// Per-splat image-space accumulators for one view.
struct SplatScreenGrads {
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
  double opacity_sig = 0.0;                          // dL/d sigmoid(opacity_logit)
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();     // dL/d Sigma' (symmetric)
  std::int64_t contribs = 0;
};

// dR/dq for a unit quaternion (w, x, y, z).
void rotation_quaternion_jacobians(const Eigen::Vector4d& q, Eigen::Matrix3d out[4]) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  out[0] << 0, -z, y,
            z, 0, -x,
           -y, x, 0;
  out[1] << 0, y, z,
            y, -2 * x, -w,
            z, w, -2 * x;
  out[2] << -2 * y, x, w,
            x, 0, z,
           -w, z, -2 * y;
  out[3] << -2 * z, -w, x,
            w, -2 * z, y,
            x, y, 0;
  for (int k = 0; k < 4; ++k) out[k] *= 2.0;
}

}  // namespace

void backward_view(const GaussianCloud& cloud, const Pose& pose, const Intrinsics& intrinsics,
                   const ImagePlane& upstream, const RasterAux& aux,
                   CloudGradients& cloud_grads, Twist& pose_twist) {
  if (aux.cloud_revision != cloud.revision) throw StaleAux();
  if (upstream.height != aux.height || upstream.width != aux.width || upstream.channels != 3) {
    throw ShapeMismatch("upstream gradient does not match the rendered view");
  }
  if (cloud_grads.positions.size() != cloud.size()) {
    throw ShapeMismatch("gradient accumulator does not match cloud size");
  }

  const std::size_t n_splats = aux.splats.size();
  std::vector<SplatScreenGrads> screen(n_splats);

  // Stage A: per-pixel chain down to screen-space quantities. Tiles own
  // disjoint pixel sets; tile-local buffers merge in tile order afterwards so
  // sums are independent of the thread count.
  const std::int64_t n_tiles = static_cast<std::int64_t>(aux.tile_lists.size());
  std::vector<std::vector<SplatScreenGrads>> tile_buffers(aux.tile_lists.size());
  parallel_for(n_tiles, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t tile = begin; tile < end; ++tile) {
      const std::vector<int>& list = aux.tile_lists[tile];
      if (list.empty()) continue;
      std::vector<SplatScreenGrads>& local = tile_buffers[tile];
      local.assign(list.size(), {});
      const int tx = static_cast<int>(tile % aux.tiles_x);
      const int ty = static_cast<int>(tile / aux.tiles_x);
      const int x0 = tx * kTileSize;
      const int y0 = ty * kTileSize;
      const int x1 = std::min(x0 + kTileSize, aux.width);
      const int y1 = std::min(y0 + kTileSize, aux.height);
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          const std::size_t p = static_cast<std::size_t>(y) * aux.width + x;
          const std::int32_t last = aux.last_contrib[p];
          if (last == 0) continue;
          const Eigen::Vector3d g(upstream.data[p * 3 + 0], upstream.data[p * 3 + 1],
                                  upstream.data[p * 3 + 2]);
          const double px = x + 0.5;
          const double py = y + 0.5;
          double t_after = aux.final_transmittance[p];
          Eigen::Vector3d suffix = Eigen::Vector3d::Zero();  // color accumulated behind
          for (int k = last - 1; k >= 0; --k) {
            const SplatRecord& s = aux.splats[list[k]];
            if (std::abs(px - s.center.x()) > s.radius ||
                std::abs(py - s.center.y()) > s.radius) {
              continue;
            }
            AlphaEval ev;
            if (!eval_splat_alpha(s, px, py, ev)) continue;
            const double one_minus = 1.0 - ev.alpha;
            const double t_before = t_after / one_minus;
            SplatScreenGrads& acc = local[k];
            acc.contribs += 1;
            acc.color += (ev.alpha * t_before) * g;
            const double d_alpha =
                s.color.dot(g) * t_before - suffix.dot(g) / one_minus;
            if (!ev.clamped) {
              acc.opacity_sig += d_alpha * ev.falloff;
              const double coef = d_alpha * ev.alpha;  // = -dL/d sigma
              acc.center += coef * ev.grad_dir;
              acc.cov += (0.5 * coef) * (ev.grad_dir * ev.grad_dir.transpose());
            }
            suffix += (ev.alpha * t_before) * s.color;
            t_after = t_before;
          }
        }
      }
    }
  });
  for (std::size_t tile = 0; tile < tile_buffers.size(); ++tile) {
    const std::vector<int>& list = aux.tile_lists[tile];
    const std::vector<SplatScreenGrads>& local = tile_buffers[tile];
    for (std::size_t k = 0; k < local.size(); ++k) {
      SplatScreenGrads& dst = screen[list[k]];
      dst.color += local[k].color;
      dst.opacity_sig += local[k].opacity_sig;
      dst.center += local[k].center;
      dst.cov += local[k].cov;
      dst.contribs += local[k].contribs;
    }
  }

  // Stage B: screen-space gradients down to Gaussian attributes and the pose
  // twist. Independent per splat; pose contributions reduce in splat order.
  std::vector<Twist> pose_partial(n_splats, Twist::Zero());
  parallel_for(static_cast<std::int64_t>(n_splats), [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t r = begin; r < end; ++r) {
      const SplatScreenGrads& sg = screen[r];
      if (sg.contribs == 0) continue;
      const SplatRecord& s = aux.splats[r];
      const std::size_t gi = static_cast<std::size_t>(s.gaussian_index);

      // Color and opacity logits through their sigmoids.
      const Eigen::Vector3d c = s.color;
      cloud_grads.color_logits[gi] += Eigen::Vector3d(sg.color.x() * c.x() * (1 - c.x()),
                                                      sg.color.y() * c.y() * (1 - c.y()),
                                                      sg.color.z() * c.z() * (1 - c.z()));
      cloud_grads.opacity_logits[gi] += sg.opacity_sig * s.opacity * (1 - s.opacity);
      cloud_grads.contrib_counts[gi] += sg.contribs;
      cloud_grads.screen_grad_norm[gi] += sg.center.norm();

      // Geometry chain.
      const Eigen::Vector3d p_cam = s.cam_pos;
      const double x = p_cam.x(), y = p_cam.y(), z = p_cam.z();
      const double fx = intrinsics.fx, fy = intrinsics.fy;
      Eigen::Matrix<double, 2, 3> j;
      j << fx / z, 0, -fx * x / (z * z),
           0, fy / z, -fy * y / (z * z);

      const Eigen::Matrix3d sigma_world =
          covariance_from_scale_rotation(cloud.log_scales[gi], cloud.rotations[gi]);
      const Eigen::Matrix3d sigma_cam = pose.rotation * sigma_world * pose.rotation.transpose();

      // dL/d Sigma_cam and the projection-center path.
      const Eigen::Matrix3d d_sigma_cam = j.transpose() * sg.cov * j;
      Eigen::Vector3d d_p_cam = j.transpose() * sg.center;

      // Jacobian's own dependence on the camera-frame point.
      Eigen::Matrix<double, 2, 3> dj[3];
      dj[0].setZero();
      dj[0](0, 2) = -fx / (z * z);
      dj[1].setZero();
      dj[1](1, 2) = -fy / (z * z);
      dj[2].setZero();
      dj[2](0, 0) = -fx / (z * z);
      dj[2](0, 2) = 2 * fx * x / (z * z * z);
      dj[2](1, 1) = -fy / (z * z);
      dj[2](1, 2) = 2 * fy * y / (z * z * z);
      for (int k = 0; k < 3; ++k) {
        const Eigen::Matrix2d m = dj[k] * sigma_cam * j.transpose();
        d_p_cam[k] += (sg.cov.array() * (m + m.transpose()).array()).sum();
      }

      // Gaussian position and the pose's action on it.
      cloud_grads.positions[gi] += pose.rotation.transpose() * d_p_cam;
      Twist& tw = pose_partial[r];
      tw.tail<3>() += d_p_cam;
      tw.head<3>() += p_cam.cross(d_p_cam);

      // Pose rotation through the camera-frame covariance.
      for (int k = 0; k < 3; ++k) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e[k] = 1.0;
        const Eigen::Matrix3d ek = skew(e);
        const Eigen::Matrix3d dm = ek * sigma_cam - sigma_cam * ek;
        tw[k] += (d_sigma_cam.array() * dm.array()).sum();
      }

      // World covariance down to log-scales and the quaternion.
      const Eigen::Matrix3d d_sigma_world =
          pose.rotation.transpose() * d_sigma_cam * pose.rotation;
      const Eigen::Vector4d q_raw = cloud.rotations[gi];
      const Eigen::Vector4d q = q_raw.normalized();
      const Eigen::Matrix3d rot = rotation_from_quaternion(q_raw);
      const Eigen::Vector3d s2 = (2.0 * cloud.log_scales[gi]).array().exp().matrix();

      for (int k = 0; k < 3; ++k) {
        const Eigen::Vector3d rk = rot.col(k);
        cloud_grads.log_scales[gi][k] += 2.0 * s2[k] * rk.dot(d_sigma_world * rk);
      }

      const Eigen::Matrix3d g_rot =
          2.0 * d_sigma_world * rot * s2.asDiagonal();  // uses symmetry of d_sigma_world
      Eigen::Matrix3d dr[4];
      rotation_quaternion_jacobians(q, dr);
      Eigen::Vector4d dq_unit;
      for (int k = 0; k < 4; ++k) dq_unit[k] = (g_rot.array() * dr[k].array()).sum();
      const double norm = q_raw.norm();
      cloud_grads.rotations[gi] +=
          (dq_unit - q * q.dot(dq_unit)) / norm;  // through the normalization
    }
  });
  for (const Twist& tw : pose_partial) pose_twist += tw;
}

std::pair<CloudGradients, PoseGradients> backward(const GaussianCloud& cloud,
                                                  const PoseSet& poses,
                                                  const std::vector<ImagePlane>& upstream,
                                                  const std::vector<RasterAux>& aux) {
  if (upstream.size() != poses.poses.size() || aux.size() != poses.poses.size()) {
    throw ShapeMismatch("backward inputs must run parallel to the pose set");
  }
  CloudGradients cloud_grads;
  cloud_grads.resize(cloud.size());
  PoseGradients pose_grads;
  pose_grads.twists.assign(poses.poses.size(), Twist::Zero());
  for (std::size_t v = 0; v < poses.poses.size(); ++v) {
    backward_view(cloud, poses.poses[v], poses.intrinsics, upstream[v], aux[v], cloud_grads,
                  pose_grads.twists[v]);
  }
  return {std::move(cloud_grads), std::move(pose_grads)};
}

}  // namespace scisplat
