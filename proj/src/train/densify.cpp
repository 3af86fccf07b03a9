// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/train/densify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "scisplat/core/rng.hpp"

namespace scisplat {

namespace {

constexpr int kMaxCopies = 64;

const double* binomial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kMaxCopies * kMaxCopies, 0.0);
    for (int n = 0; n < kMaxCopies; ++n) {
      t[n * kMaxCopies + 0] = 1.0;
      for (int k = 1; k <= n; ++k) {
        t[n * kMaxCopies + k] =
            t[(n - 1) * kMaxCopies + k - 1] + (k <= n - 1 ? t[(n - 1) * kMaxCopies + k] : 0.0);
      }
    }
    return t;
  }();
  return table.data();
}

/// Redistributed opacity for `copies` coincident Gaussians replacing one of
/// opacity o: the composed alpha stays o at the center.
double redistributed_opacity(double o, int copies) {
  const double o_new = 1.0 - std::pow(1.0 - o, 1.0 / static_cast<double>(copies));
  return std::clamp(o_new, 1e-4, 1.0 - 1e-6);
}

/// Linear scale multiplier keeping the composed falloff of `copies` stacked
/// Gaussians close to the original away from the center as well.
double relocation_scale_factor(double o_old, double o_new, int copies) {
  const double* binom = binomial_table();
  double denom = 0.0;
  for (int i = 1; i <= copies; ++i) {
    for (int j = 0; j <= i - 1; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      denom += binom[(i - 1) * kMaxCopies + j] * sign * std::pow(o_new, j + 1) /
               std::sqrt(static_cast<double>(j + 1));
    }
  }
  if (!(denom > 0.0)) return 1.0;
  return o_old / denom;
}

void copy_gaussian(GaussianCloud& cloud, std::size_t from, std::size_t to) {
  cloud.positions[to] = cloud.positions[from];
  cloud.log_scales[to] = cloud.log_scales[from];
  cloud.rotations[to] = cloud.rotations[from];
  cloud.opacity_logits[to] = cloud.opacity_logits[from];
  cloud.color_logits[to] = cloud.color_logits[from];
}

void append_copy(GaussianCloud& cloud, std::size_t from) {
  cloud.positions.push_back(cloud.positions[from]);
  cloud.log_scales.push_back(cloud.log_scales[from]);
  cloud.rotations.push_back(cloud.rotations[from]);
  cloud.opacity_logits.push_back(cloud.opacity_logits[from]);
  cloud.color_logits.push_back(cloud.color_logits[from]);
}

/// Opacity-weighted sampling with replacement; indices map into `candidates`.
std::vector<std::size_t> sample_by_opacity(const GaussianCloud& cloud,
                                           const std::vector<std::size_t>& candidates,
                                           std::size_t n, Rng& rng) {
  std::vector<double> cumulative(candidates.size());
  double total = 0.0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    total += cloud.opacity(candidates[k]);
    cumulative[k] = total;
  }
  std::vector<std::size_t> picks(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double r = rng.uniform() * total;
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), r);
    std::size_t k = static_cast<std::size_t>(it - cumulative.begin());
    if (k >= candidates.size()) k = candidates.size() - 1;
    picks[s] = candidates[k];
  }
  return picks;
}

/// Applies the opacity/scale redistribution for `extra` additional copies of
/// `target`, returning nothing; the caller materializes the copies.
void redistribute(GaussianCloud& cloud, std::size_t target, int extra) {
  const int copies = std::min(extra + 1, kMaxCopies - 1);
  const double o_old = cloud.opacity(target);
  const double o_new = redistributed_opacity(o_old, copies);
  const double factor = relocation_scale_factor(o_old, o_new, copies);
  cloud.opacity_logits[target] = logit(o_new);
  cloud.log_scales[target].array() += std::log(std::max(factor, 1e-12));
}

}  // namespace

DensifyStats mcmc_relocate_and_grow(TrainState& state, const TrainConfig& config,
                                    std::uint64_t iteration) {
  DensifyStats stats;
  GaussianCloud& cloud = state.cloud;
  Rng rng(detail::mix64(state.seed ^ (0x64656e73ull + iteration)));

  // (a) Relocate dead Gaussians onto opacity-weighted targets.
  std::vector<std::size_t> dead, alive;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    (cloud.opacity(i) < config.dead_opacity ? dead : alive).push_back(i);
  }
  if (!dead.empty() && !alive.empty()) {
    const std::vector<std::size_t> targets = sample_by_opacity(cloud, alive, dead.size(), rng);
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t k = 0; k < dead.size(); ++k) groups[targets[k]].push_back(dead[k]);
    for (const auto& [target, members] : groups) {
      redistribute(cloud, target, static_cast<int>(members.size()));
      for (std::size_t d : members) {
        copy_gaussian(cloud, target, d);
        state.reset_gaussian_moments(d);
      }
      state.reset_gaussian_moments(target);
      stats.relocated += static_cast<int>(members.size());
    }
  }

  // (b) Grow toward the cap by the same redistribution rule.
  const std::size_t count = cloud.size();
  if (count < config.max_gaussians && count > 0) {
    const std::size_t headroom = config.max_gaussians - count;
    const std::size_t n_new = std::min(
        static_cast<std::size_t>(config.growth_fraction * static_cast<double>(count)), headroom);
    if (n_new > 0) {
      std::vector<std::size_t> all(count);
      for (std::size_t i = 0; i < count; ++i) all[i] = i;
      const std::vector<std::size_t> targets = sample_by_opacity(cloud, all, n_new, rng);
      std::map<std::size_t, int> groups;
      for (std::size_t t : targets) groups[t] += 1;
      for (const auto& [target, extra] : groups) {
        redistribute(cloud, target, extra);
        for (int e = 0; e < extra; ++e) append_copy(cloud, target);
        state.reset_gaussian_moments(target);
      }
      state.append_gaussian_moment_rows(cloud.size() - count);
      stats.added = static_cast<int>(cloud.size() - count);
    }
  }
  cloud.revision += 1;
  return stats;
}

void mcmc_position_noise(TrainState& state, const TrainConfig& config, double lr_position,
                         std::uint64_t iteration) {
  GaussianCloud& cloud = state.cloud;
  const std::uint64_t key = detail::mix64(state.seed ^ (0x6e6f697365ull + iteration));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double amplitude = config.position_noise_coeff * lr_position * (1.0 - cloud.opacity(i));
    for (int k = 0; k < 3; ++k) {
      cloud.positions[i][k] += amplitude * counter_normal(key, i * 3 + k);
    }
  }
  cloud.revision += 1;
}

namespace {

void remove_gaussians(TrainState& state, const std::vector<std::uint8_t>& keep) {
  GaussianCloud& cloud = state.cloud;
  const std::size_t n = cloud.size();
  std::size_t w = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    if (w != i) {
      copy_gaussian(cloud, i, w);
      for (int k = 0; k < 3; ++k) {
        state.adam_positions.m[w * 3 + k] = state.adam_positions.m[i * 3 + k];
        state.adam_positions.v[w * 3 + k] = state.adam_positions.v[i * 3 + k];
        state.adam_log_scales.m[w * 3 + k] = state.adam_log_scales.m[i * 3 + k];
        state.adam_log_scales.v[w * 3 + k] = state.adam_log_scales.v[i * 3 + k];
        state.adam_colors.m[w * 3 + k] = state.adam_colors.m[i * 3 + k];
        state.adam_colors.v[w * 3 + k] = state.adam_colors.v[i * 3 + k];
      }
      for (int k = 0; k < 4; ++k) {
        state.adam_rotations.m[w * 4 + k] = state.adam_rotations.m[i * 4 + k];
        state.adam_rotations.v[w * 4 + k] = state.adam_rotations.v[i * 4 + k];
      }
      state.adam_opacities.m[w] = state.adam_opacities.m[i];
      state.adam_opacities.v[w] = state.adam_opacities.v[i];
    }
    ++w;
  }
  cloud.positions.resize(w);
  cloud.log_scales.resize(w);
  cloud.rotations.resize(w);
  cloud.opacity_logits.resize(w);
  cloud.color_logits.resize(w);
  state.adam_positions.m.resize(w * 3); state.adam_positions.v.resize(w * 3);
  state.adam_log_scales.m.resize(w * 3); state.adam_log_scales.v.resize(w * 3);
  state.adam_colors.m.resize(w * 3); state.adam_colors.v.resize(w * 3);
  state.adam_rotations.m.resize(w * 4); state.adam_rotations.v.resize(w * 4);
  state.adam_opacities.m.resize(w); state.adam_opacities.v.resize(w);
}

}  // namespace

DensifyStats adc_densify(TrainState& state, const TrainConfig& config, std::uint64_t iteration) {
  DensifyStats stats;
  GaussianCloud& cloud = state.cloud;
  Rng rng(detail::mix64(state.seed ^ (0x616463ull + iteration)));
  const std::size_t count = cloud.size();

  // Clone small / split large Gaussians whose screen gradients stayed high.
  for (std::size_t i = 0; i < count && cloud.size() < config.max_gaussians; ++i) {
    if (cloud.opacity(i) < config.dead_opacity) continue;  // headed for pruning
    const double events = static_cast<double>(std::max<std::int64_t>(state.grad_event_count[i], 1));
    const double avg_grad = state.grad_norm_accum[i] / events;
    if (avg_grad <= config.adc_grad_threshold) continue;
    const double mean_scale = cloud.scale(i).mean();
    if (mean_scale > config.adc_split_scale) {
      // Split: two smaller copies jittered inside the original footprint.
      cloud.log_scales[i].array() -= std::log(1.6);
      append_copy(cloud, i);
      const std::size_t j = cloud.size() - 1;
      const Eigen::Matrix3d rot = rotation_from_quaternion(cloud.rotations[i]);
      const Eigen::Vector3d s = cloud.scale(i);
      for (std::size_t target : {i, j}) {
        Eigen::Vector3d n(rng.normal(), rng.normal(), rng.normal());
        cloud.positions[target] += rot * (s.asDiagonal() * n);
      }
      state.append_gaussian_moment_rows(1);
      state.reset_gaussian_moments(i);
      state.grad_norm_accum.push_back(0.0);
      state.grad_event_count.push_back(0);
      stats.added += 1;
    } else {
      // Clone in place; the duplicate drifts apart through optimization.
      append_copy(cloud, i);
      state.append_gaussian_moment_rows(1);
      state.grad_norm_accum.push_back(0.0);
      state.grad_event_count.push_back(0);
      stats.added += 1;
    }
  }

  // Prune transparent Gaussians, keeping at least one.
  std::vector<std::uint8_t> keep(cloud.size(), 1);
  int pruned = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.opacity(i) < config.dead_opacity &&
        pruned + 1 < static_cast<int>(cloud.size())) {
      keep[i] = 0;
      ++pruned;
    }
  }
  if (pruned > 0) {
    remove_gaussians(state, keep);
    stats.pruned = pruned;
  }

  state.reset_densify_stats();
  cloud.revision += 1;
  return stats;
}

}  // namespace scisplat
