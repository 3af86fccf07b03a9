// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/metrics/metrics.hpp"

#include <Eigen/Geometry>
#include <cmath>

#include "scisplat/core/errors.hpp"

namespace scisplat {

double psnr(const ImagePlane& a, const ImagePlane& b) {
  const double mse = image_mse(a, b);
  if (mse <= 0.0) return kPsnrCap;
  return std::min(10.0 * std::log10(1.0 / mse), kPsnrCap);
}

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (K1 * L)^2 with L = 1
constexpr double kC2 = 0.03 * 0.03;

const double* window_weights() {
  static const std::vector<double> weights = [] {
    std::vector<double> w(kWindow * kWindow);
    const int half = kWindow / 2;
    double sum = 0.0;
    for (int dy = 0; dy < kWindow; ++dy) {
      for (int dx = 0; dx < kWindow; ++dx) {
        const double r2 = (dx - half) * (dx - half) + (dy - half) * (dy - half);
        const double v = std::exp(-r2 / (2.0 * kWindowSigma * kWindowSigma));
        w[dy * kWindow + dx] = v;
        sum += v;
      }
    }
    for (double& v : w) v /= sum;
    return w;
  }();
  return weights.data();
}

}  // namespace

double ssim_with_grad(const ImagePlane& a, const ImagePlane& b, ImagePlane* grad_a) {
  if (!a.same_shape(b)) throw ShapeMismatch("ssim operands");
  if (a.height < kWindow || a.width < kWindow) {
    throw TooSmall("ssim needs min dimension >= 11");
  }
  const int h = a.height, w = a.width, ch = a.channels;
  const double* win = window_weights();
  const int out_h = h - kWindow + 1;
  const int out_w = w - kWindow + 1;
  const double n_positions = static_cast<double>(out_h) * out_w * ch;

  if (grad_a) {
    *grad_a = ImagePlane::zeros(h, w, ch);
  }

  double total = 0.0;
  for (int c = 0; c < ch; ++c) {
    for (int oy = 0; oy < out_h; ++oy) {
      for (int ox = 0; ox < out_w; ++ox) {
        double mu_a = 0.0, mu_b = 0.0, m_aa = 0.0, m_bb = 0.0, m_ab = 0.0;
        for (int dy = 0; dy < kWindow; ++dy) {
          for (int dx = 0; dx < kWindow; ++dx) {
            const double weight = win[dy * kWindow + dx];
            const double va = a.at(oy + dy, ox + dx, c);
            const double vb = b.at(oy + dy, ox + dx, c);
            mu_a += weight * va;
            mu_b += weight * vb;
            m_aa += weight * va * va;
            m_bb += weight * vb * vb;
            m_ab += weight * va * vb;
          }
        }
        const double var_a = m_aa - mu_a * mu_a;
        const double var_b = m_bb - mu_b * mu_b;
        const double cov_ab = m_ab - mu_a * mu_b;

        const double l_num = 2.0 * mu_a * mu_b + kC1;
        const double l_den = mu_a * mu_a + mu_b * mu_b + kC1;
        const double cs_num = 2.0 * cov_ab + kC2;
        const double cs_den = var_a + var_b + kC2;
        const double lum = l_num / l_den;
        const double cs = cs_num / cs_den;
        total += lum * cs;

        if (grad_a) {
          // Partials against the raw windowed moments of a.
          const double dl_dmua = (2.0 * mu_b * l_den - l_num * 2.0 * mu_a) / (l_den * l_den);
          const double dcs_dvara = -cs_num / (cs_den * cs_den);
          const double dcs_dcov = 2.0 / cs_den;
          const double ds_dmua = cs * dl_dmua +
                                 lum * (dcs_dvara * (-2.0 * mu_a) + dcs_dcov * (-mu_b));
          const double ds_dmaa = lum * dcs_dvara;
          const double ds_dmab = lum * dcs_dcov;
          for (int dy = 0; dy < kWindow; ++dy) {
            for (int dx = 0; dx < kWindow; ++dx) {
              const double weight = win[dy * kWindow + dx];
              const double va = a.at(oy + dy, ox + dx, c);
              const double vb = b.at(oy + dy, ox + dx, c);
              grad_a->at(oy + dy, ox + dx, c) +=
                  weight * (ds_dmua + 2.0 * va * ds_dmaa + vb * ds_dmab) / n_positions;
            }
          }
        }
      }
    }
  }
  return total / n_positions;
}

double ssim(const ImagePlane& a, const ImagePlane& b) { return ssim_with_grad(a, b, nullptr); }

Trajectory trajectory_from_poses(const std::vector<Pose>& poses) {
  Trajectory t;
  t.poses = poses;
  t.indices.resize(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) t.indices[i] = static_cast<int>(i + 1);
  return t;
}

double ate(const Trajectory& estimated, const Trajectory& reference) {
  if (estimated.size() != reference.size()) {
    throw LengthMismatch("trajectories differ in length");
  }
  if (estimated.size() < 2) throw LengthMismatch("ate needs at least two poses");
  for (std::size_t i = 0; i < estimated.indices.size(); ++i) {
    if (estimated.indices[i] != reference.indices[i]) {
      throw LengthMismatch("trajectory frame indices do not match");
    }
  }

  const std::size_t n = estimated.size();
  Eigen::Matrix3Xd src(3, n), dst(3, n);
  for (std::size_t i = 0; i < n; ++i) {
    src.col(i) = estimated.poses[i].center();
    dst.col(i) = reference.poses[i].center();
  }

  const Eigen::Vector3d dst_mean = dst.rowwise().mean();
  double spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) spread += (dst.col(i) - dst_mean).squaredNorm();
  if (spread < 1e-24) throw DegenerateGeometry("reference positions are coincident");

  const Eigen::Matrix4d transform = Eigen::umeyama(src, dst, true);
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d aligned =
        transform.topLeftCorner<3, 3>() * src.col(i) + transform.topRightCorner<3, 1>();
    sq_sum += (aligned - dst.col(i)).squaredNorm();
  }
  return std::sqrt(sq_sum / static_cast<double>(n));
}

}  // namespace scisplat
