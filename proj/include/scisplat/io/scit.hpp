// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0
//
// SCIT tensor file: magic "SCIT", little-endian u32 version (= 1), u32 ndim,
// ndim u32 dims, then row-major float32 payload. The one byte-exact
// interchange format every quantitative path uses.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scisplat/core/image.hpp"
#include "scisplat/sci/masks.hpp"

namespace scisplat {

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const {
    std::size_t n = 1;
    for (std::uint32_t d : dims) n *= d;
    return n;
  }
};

void write_scit(const std::string& path, const Tensor& tensor);
Tensor read_scit(const std::string& path);  // throws FileFormatError

// ImagePlane <-> rank-3 tensor (H, W, C).
Tensor tensor_from_image(const ImagePlane& image);
ImagePlane image_from_tensor(const Tensor& tensor);

// MaskStack <-> rank-3 tensor (N, H, W). Ratio metadata travels separately.
Tensor tensor_from_masks(const MaskStack& masks);
MaskStack masks_from_tensor(const Tensor& tensor);

}  // namespace scisplat
