// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "scisplat/core/image.hpp"

namespace scisplat {

/// 8-bit PNG preview (grayscale or RGB). Values are clamped to [0, 1] before
/// quantization; quantitative paths must use SCIT files instead.
void write_png(const std::string& path, const ImagePlane& image);

}  // namespace scisplat
