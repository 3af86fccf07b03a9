// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "scisplat/core/image.hpp"
#include "scisplat/sci/measurement.hpp"
#include "scisplat/splat/cloud.hpp"
#include "scisplat/train/config.hpp"

namespace scisplat {

/// Synthesized measurement from rendered frames: sum of frame (*) mask, no
/// noise term. The differentiable half of the forward model.
Measurement synthesize_from_renders(const std::vector<ImagePlane>& frames,
                                    const MaskStack& masks);

struct LossValueGrad {
  double value = 0.0;
  ImagePlane grad;  // d value / d y_hat, in the unnormalized measurement domain
};

/// Loss between synthesized and captured measurements. Both are divided by
/// `normalization` (the frame count) first so image-domain constants apply;
/// pass 1 for already-normalized inputs. Modes: mean squared error, or
/// (1 - lambda) L1 + lambda * D-SSIM with D-SSIM = (1 - SSIM) / 2.
LossValueGrad measurement_loss(const ImagePlane& y_hat, const ImagePlane& y, LossMode mode,
                               double lambda_dssim, double normalization);

struct RegularizerGrads {
  double value = 0.0;
  std::vector<double> d_opacity_logit;
  std::vector<Eigen::Vector3d> d_log_scale;
};

/// lambda_o * sum |o_i| + lambda_s * sum_ij sqrt(eig_j(Sigma_i)); the
/// eigenvalue roots of Sigma are exactly the linear scales exp(log_scale).
RegularizerGrads regularizers(const GaussianCloud& cloud, double lambda_opacity,
                              double lambda_scale);

}  // namespace scisplat
