// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace scisplat {

/// Row-major, channel-interleaved floating-point image.
/// Frames hold intensities in [0, 1]; measurement and gradient buffers reuse
/// the same container with unrestricted values.
struct ImagePlane {
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<double> data;  // index (y * width + x) * channels + c

  ImagePlane() = default;
  ImagePlane(int h, int w, int c, double fill = 0.0)
      : height(h), width(w), channels(c),
        data(static_cast<std::size_t>(h) * w * c, fill) {}

  static ImagePlane zeros(int h, int w, int c) { return ImagePlane(h, w, c, 0.0); }

  double& at(int y, int x, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  std::size_t size() const { return data.size(); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }

  bool same_shape(const ImagePlane& other) const {
    return height == other.height && width == other.width && channels == other.channels;
  }

  bool all_finite() const;

  /// Round every value to the nearest float32. Datasets are stored as f32, so
  /// quantizing before synthesis keeps file round-trips bit-exact.
  void quantize_to_f32();
};

/// Mean squared error between two same-shaped images.
double image_mse(const ImagePlane& a, const ImagePlane& b);

}  // namespace scisplat
