// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/train/trainer.hpp"

#include <cmath>

#include "scisplat/core/errors.hpp"
#include "scisplat/splat/backward.hpp"
#include "scisplat/splat/render.hpp"
#include "scisplat/train/densify.hpp"
#include "scisplat/train/loss.hpp"

namespace scisplat {

double TrainConfig::pose_lr_at(int iteration) const {
  if (iterations <= 1) return pose_lr_start;
  const double t = static_cast<double>(iteration) / static_cast<double>(iterations - 1);
  return pose_lr_start * std::pow(pose_lr_end / pose_lr_start, t);
}

double TrainConfig::gaussian_lr_decay_at(int iteration) const {
  if (iterations <= 1 || gaussian_lr_decay >= 1.0) return 1.0;
  const double t = static_cast<double>(iteration) / static_cast<double>(iterations - 1);
  return std::pow(gaussian_lr_decay, t);
}

void TrainState::reset_gaussian_moments(std::size_t index) {
  adam_positions.reset_rows(index * 3, 3);
  adam_log_scales.reset_rows(index * 3, 3);
  adam_rotations.reset_rows(index * 4, 4);
  adam_opacities.reset_rows(index, 1);
  adam_colors.reset_rows(index * 3, 3);
}

void TrainState::append_gaussian_moment_rows(std::size_t count) {
  adam_positions.append_zero_rows(count * 3);
  adam_log_scales.append_zero_rows(count * 3);
  adam_rotations.append_zero_rows(count * 4);
  adam_opacities.append_zero_rows(count);
  adam_colors.append_zero_rows(count * 3);
}

void TrainState::reset_densify_stats() {
  grad_norm_accum.assign(cloud.size(), 0.0);
  grad_event_count.assign(cloud.size(), 0);
}

TrainState make_initial_state(GaussianCloud cloud, PoseSet poses, const TrainConfig& config) {
  TrainState state;
  state.cloud = std::move(cloud);
  state.poses = std::move(poses);
  state.seed = config.seed;
  const std::size_t n = state.cloud.size();
  state.adam_positions.resize(n * 3);
  state.adam_log_scales.resize(n * 3);
  state.adam_rotations.resize(n * 4);
  state.adam_opacities.resize(n);
  state.adam_colors.resize(n * 3);
  state.adam_poses.resize(state.poses.poses.size() * 6);
  state.reset_densify_stats();
  return state;
}

namespace {

ImagePlane collapse_to_gray(const ImagePlane& rgb) {
  ImagePlane out(rgb.height, rgb.width, 1);
  for (std::size_t p = 0; p < rgb.pixel_count(); ++p) {
    out.data[p] = (rgb.data[p * 3] + rgb.data[p * 3 + 1] + rgb.data[p * 3 + 2]) / 3.0;
  }
  return out;
}

// dL/d(gray frame) (*) mask expanded back to the RGB render.
ImagePlane expand_gray_gradient(const ImagePlane& grad_gray) {
  ImagePlane out(grad_gray.height, grad_gray.width, 3);
  for (std::size_t p = 0; p < grad_gray.pixel_count(); ++p) {
    const double g = grad_gray.data[p] / 3.0;
    out.data[p * 3] = g;
    out.data[p * 3 + 1] = g;
    out.data[p * 3 + 2] = g;
  }
  return out;
}

}  // namespace

TrainState train(const Measurement& measurement, const MaskStack& masks, GaussianCloud init_cloud,
                 PoseSet init_poses, const TrainConfig& config, const DensifyObserver& observer) {
  if (init_cloud.empty()) throw InvalidSpec("initial cloud must be nonempty");
  if (static_cast<int>(init_poses.poses.size()) != masks.n_frames) {
    throw ShapeMismatch("pose count must equal the compression ratio");
  }
  if (measurement.image.height != masks.height || measurement.image.width != masks.width) {
    throw ShapeMismatch("measurement does not match mask stack");
  }

  TrainState state = make_initial_state(std::move(init_cloud), std::move(init_poses), config);
  const int h = masks.height;
  const int w = masks.width;
  const int n_frames = masks.n_frames;
  const bool gray_target = measurement.image.channels == 1;
  const double lr_base = gaussian_lr_scale(n_frames, config.scale_lr_by_sqrt_frames);

  for (int iter = 0; iter < config.iterations; ++iter) {
    // Forward: render the frame stack and synthesize the measurement.
    std::vector<ImagePlane> renders;
    std::vector<RasterAux> auxes;
    renders.reserve(n_frames);
    auxes.reserve(n_frames);
    for (int f = 0; f < n_frames; ++f) {
      RenderResult r = rasterize(state.cloud, state.poses.poses[f], state.poses.intrinsics, h, w);
      renders.push_back(std::move(r.image));
      auxes.push_back(std::move(r.aux));
    }
    std::vector<ImagePlane> frames_for_loss;
    frames_for_loss.reserve(n_frames);
    for (const ImagePlane& frame : renders) {
      frames_for_loss.push_back(gray_target ? collapse_to_gray(frame) : frame);
    }
    const Measurement y_hat = synthesize_from_renders(frames_for_loss, masks);

    LossValueGrad photo = measurement_loss(y_hat.image, measurement.image, config.loss_mode,
                                           config.lambda_dssim, n_frames);
    RegularizerGrads reg =
        regularizers(state.cloud, config.lambda_opacity, config.lambda_scale);
    const double total = photo.value + reg.value;
    state.loss_history.push_back(total);
    if (!std::isfinite(total)) {
      throw Diverged("loss is not finite at iteration " + std::to_string(iter) +
                     "; lower the learning rates");
    }

    // Upstream per frame: dL/dY (*) M_i, then back through the gray collapse
    // when the measurement is single-channel.
    std::vector<ImagePlane> upstream;
    upstream.reserve(n_frames);
    const int loss_ch = photo.grad.channels;
    for (int f = 0; f < n_frames; ++f) {
      const double* mask = masks.values.data() + f * masks.frame_size();
      ImagePlane g(h, w, loss_ch);
      for (std::size_t p = 0; p < g.pixel_count(); ++p) {
        for (int c = 0; c < loss_ch; ++c) {
          g.data[p * loss_ch + c] = photo.grad.data[p * loss_ch + c] * mask[p];
        }
      }
      upstream.push_back(gray_target ? expand_gray_gradient(g) : std::move(g));
    }

    auto [cloud_grads, pose_grads] = backward(state.cloud, state.poses, upstream, auxes);
    for (std::size_t i = 0; i < state.cloud.size(); ++i) {
      cloud_grads.opacity_logits[i] += reg.d_opacity_logit[i];
      cloud_grads.log_scales[i] += reg.d_log_scale[i];
      state.grad_norm_accum[i] += cloud_grads.screen_grad_norm[i];
      state.grad_event_count[i] += 1;
    }

    // Adam steps. Parameter groups are contiguous arrays of doubles.
    const int step_index = iter + 1;
    const std::size_t n = state.cloud.size();
    const double lr_scale = lr_base * config.gaussian_lr_decay_at(iter);
    adam_update(state.adam_positions, cloud_grads.positions.data()->data(),
                state.cloud.positions.data()->data(), n * 3, config.lr_position * lr_scale,
                step_index);
    adam_update(state.adam_log_scales, cloud_grads.log_scales.data()->data(),
                state.cloud.log_scales.data()->data(), n * 3, config.lr_log_scale * lr_scale,
                step_index);
    adam_update(state.adam_rotations, cloud_grads.rotations.data()->data(),
                state.cloud.rotations.data()->data(), n * 4, config.lr_rotation * lr_scale,
                step_index);
    adam_update(state.adam_opacities, cloud_grads.opacity_logits.data(),
                state.cloud.opacity_logits.data(), n, config.lr_opacity * lr_scale, step_index);
    adam_update(state.adam_colors, cloud_grads.color_logits.data()->data(),
                state.cloud.color_logits.data()->data(), n * 3, config.lr_color * lr_scale,
                step_index);
    state.cloud.normalize_rotations();

    if (config.optimize_poses) {
      const double pose_lr = config.pose_lr_at(iter);
      for (std::size_t f = 0; f < state.poses.poses.size(); ++f) {
        Twist delta;
        for (int k = 0; k < 6; ++k) {
          const std::size_t idx = f * 6 + k;
          const double g = pose_grads.twists[f][k];
          double& m = state.adam_poses.m[idx];
          double& v = state.adam_poses.v[idx];
          m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * g;
          v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * g * g;
          const double m_hat = m / (1.0 - std::pow(kAdamBeta1, step_index));
          const double v_hat = v / (1.0 - std::pow(kAdamBeta2, step_index));
          delta[k] = pose_lr * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
        }
        state.poses.poses[f] = se3_exp(-delta).compose(state.poses.poses[f]);
      }
    }
    state.cloud.revision += 1;
    state.iteration = iter + 1;

    // Periodic densification, skipped near the end of the run.
    const bool densify_due =
        config.densify_mode != DensifyMode::kOff && config.densify_interval > 0 &&
        state.iteration % config.densify_interval == 0 &&
        state.iteration <= config.densify_stop_fraction * config.iterations;
    if (densify_due) {
      if (config.densify_mode == DensifyMode::kMcmc) {
        if (observer) observer(state, 0);
        mcmc_relocate_and_grow(state, config, static_cast<std::uint64_t>(state.iteration));
        if (observer) observer(state, 1);
        mcmc_position_noise(state, config,
                            config.lr_position * lr_base * config.gaussian_lr_decay_at(iter),
                            static_cast<std::uint64_t>(state.iteration));
      } else {
        if (observer) observer(state, 0);
        adc_densify(state, config, static_cast<std::uint64_t>(state.iteration));
        if (observer) observer(state, 1);
      }
      state.reset_densify_stats();
    }
  }
  return state;
}

double evaluate_measurement_loss(const TrainState& state, const Measurement& measurement,
                                 const MaskStack& masks, const TrainConfig& config) {
  std::vector<ImagePlane> renders =
      render_views(state.cloud, state.poses, masks.height, masks.width);
  if (measurement.image.channels == 1) {
    for (ImagePlane& frame : renders) frame = collapse_to_gray(frame);
  }
  const Measurement y_hat = synthesize_from_renders(renders, masks);
  return measurement_loss(y_hat.image, measurement.image, config.loss_mode, config.lambda_dssim,
                          masks.n_frames)
      .value;
}

}  // namespace scisplat
