// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/core/image.hpp"

#include <cmath>

#include "scisplat/core/errors.hpp"

namespace scisplat {

bool ImagePlane::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void ImagePlane::quantize_to_f32() {
  for (double& v : data) v = static_cast<double>(static_cast<float>(v));
}

double image_mse(const ImagePlane& a, const ImagePlane& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("image_mse operands");
  if (a.data.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.data.size());
}

}  // namespace scisplat
