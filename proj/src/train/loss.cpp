// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/train/loss.hpp"

#include <cmath>

#include "scisplat/core/errors.hpp"
#include "scisplat/metrics/metrics.hpp"

namespace scisplat {

Measurement synthesize_from_renders(const std::vector<ImagePlane>& frames,
                                    const MaskStack& masks) {
  return synthesize_measurement(frames, masks, 0.0, 0);
}

LossValueGrad measurement_loss(const ImagePlane& y_hat, const ImagePlane& y, LossMode mode,
                               double lambda_dssim, double normalization) {
  if (!y_hat.same_shape(y)) throw ShapeMismatch("measurement loss operands");
  if (normalization <= 0.0) throw InvalidRatio("normalization must be positive");

  ImagePlane a = y_hat;
  ImagePlane b = y;
  for (double& v : a.data) v /= normalization;
  for (double& v : b.data) v /= normalization;
  const double n = static_cast<double>(a.data.size());

  LossValueGrad out;
  out.grad = ImagePlane::zeros(y_hat.height, y_hat.width, y_hat.channels);

  if (mode == LossMode::kMse) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.data.size(); ++k) {
      const double d = a.data[k] - b.data[k];
      acc += d * d;
      out.grad.data[k] = 2.0 * d / (n * normalization);
    }
    out.value = acc / n;
    return out;
  }

  // (1 - lambda) L1 + lambda D-SSIM.
  double l1 = 0.0;
  for (std::size_t k = 0; k < a.data.size(); ++k) {
    const double d = a.data[k] - b.data[k];
    l1 += std::abs(d);
    const double sign = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    out.grad.data[k] = (1.0 - lambda_dssim) * sign / (n * normalization);
  }
  l1 /= n;

  ImagePlane dssim_grad;
  const double ssim_value = ssim_with_grad(a, b, &dssim_grad);
  const double dssim = 0.5 * (1.0 - ssim_value);
  for (std::size_t k = 0; k < a.data.size(); ++k) {
    out.grad.data[k] += lambda_dssim * (-0.5) * dssim_grad.data[k] / normalization;
  }
  out.value = (1.0 - lambda_dssim) * l1 + lambda_dssim * dssim;
  return out;
}

RegularizerGrads regularizers(const GaussianCloud& cloud, double lambda_opacity,
                              double lambda_scale) {
  RegularizerGrads out;
  out.d_opacity_logit.assign(cloud.size(), 0.0);
  out.d_log_scale.assign(cloud.size(), Eigen::Vector3d::Zero());
  double opacity_term = 0.0;
  double scale_term = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double o = cloud.opacity(i);
    opacity_term += o;  // |o| with o in (0, 1)
    out.d_opacity_logit[i] = lambda_opacity * o * (1.0 - o);
    const Eigen::Vector3d s = cloud.scale(i);
    scale_term += s.sum();
    out.d_log_scale[i] = lambda_scale * s;  // d exp(log_s) / d log_s = s
  }
  out.value = lambda_opacity * opacity_term + lambda_scale * scale_term;
  return out;
}

}  // namespace scisplat
