// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/init/degraded.hpp"

#include <algorithm>
#include <limits>

#include "scisplat/core/errors.hpp"
#include "scisplat/core/parallel.hpp"

namespace scisplat {

std::vector<std::uint8_t> select_mask(const double* mask_frame, int height, int width,
                                      double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidRatio("tau must be in (0, 1]");
  std::vector<std::uint8_t> selected(static_cast<std::size_t>(height) * width);
  for (std::size_t p = 0; p < selected.size(); ++p) selected[p] = mask_frame[p] >= tau ? 1 : 0;
  return selected;
}

ImagePlane fill_interpolate(const ImagePlane& sparse, const std::vector<std::uint8_t>& validity) {
  const int h = sparse.height;
  const int w = sparse.width;
  const int ch = sparse.channels;
  if (validity.size() != sparse.pixel_count()) {
    throw ShapeMismatch("validity mask does not match image");
  }
  bool any_valid = false;
  for (std::uint8_t v : validity) {
    if (v) { any_valid = true; break; }
  }
  if (!any_valid) throw EmptySelection("no valid pixel to interpolate from");

  // Per column, the nearest valid row for every y (ties resolved upward,
  // which is the smaller row-major index). -1 marks an empty column.
  std::vector<int> nearest_row(static_cast<std::size_t>(h) * w, -1);
  for (int x = 0; x < w; ++x) {
    int last = -1;  // nearest valid at or above
    for (int y = 0; y < h; ++y) {
      if (validity[static_cast<std::size_t>(y) * w + x]) last = y;
      nearest_row[static_cast<std::size_t>(y) * w + x] = last;
    }
    int next = -1;  // nearest valid at or below
    for (int y = h - 1; y >= 0; --y) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (validity[idx]) next = y;
      const int up = nearest_row[idx];
      if (up < 0) {
        nearest_row[idx] = next;
      } else if (next >= 0 && (next - y) < (y - up)) {
        nearest_row[idx] = next;  // strictly closer below; ties keep the upper row
      }
    }
  }

  ImagePlane out = sparse;
  parallel_for(h, [&](std::int64_t row_begin, std::int64_t row_end) {
    for (int y = static_cast<int>(row_begin); y < row_end; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * w + x;
        if (validity[p]) continue;
        long best_d2 = std::numeric_limits<long>::max();
        long best_rm = 0;
        for (int cx = 0; cx < w; ++cx) {
          const int cy = nearest_row[static_cast<std::size_t>(y) * w + cx];
          if (cy < 0) continue;
          const long dx = cx - x;
          const long dy = cy - y;
          const long d2 = dx * dx + dy * dy;
          const long rm = static_cast<long>(cy) * w + cx;
          if (d2 < best_d2 || (d2 == best_d2 && rm < best_rm)) {
            best_d2 = d2;
            best_rm = rm;
          }
        }
        for (int c = 0; c < ch; ++c) {
          out.data[p * ch + c] = sparse.data[static_cast<std::size_t>(best_rm) * ch + c];
        }
      }
    }
  });
  return out;
}

std::vector<DegradedFrame> extract_degraded_frames(const Measurement& y, const MaskStack& masks,
                                                   double tau) {
  const NormalizedMeasurement normalized = normalize_measurement(y, masks);
  const int h = masks.height;
  const int w = masks.width;
  const int ch = y.image.channels;

  std::vector<DegradedFrame> frames;
  frames.reserve(masks.n_frames);
  for (int i = 0; i < masks.n_frames; ++i) {
    const double* mask = masks.values.data() + i * masks.frame_size();
    std::vector<std::uint8_t> selected = select_mask(mask, h, w, tau);

    DegradedFrame frame;
    frame.validity.assign(masks.frame_size(), 0);
    ImagePlane sparse = ImagePlane::zeros(h, w, ch);
    std::size_t n_valid = 0;
    for (std::size_t p = 0; p < masks.frame_size(); ++p) {
      // A pixel is usable when the mask samples it (M_i (*) B_i nonzero) and
      // the normalized measurement exists there.
      if (selected[p] && mask[p] > 0.0 && normalized.valid[p]) {
        frame.validity[p] = 1;
        ++n_valid;
        for (int c = 0; c < ch; ++c) sparse.data[p * ch + c] = normalized.image.data[p * ch + c];
      }
    }
    if (n_valid == 0) {
      throw EmptySelection("frame " + std::to_string(i) + " retained no valid pixels; lower tau");
    }
    frame.image = fill_interpolate(sparse, frame.validity);
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace scisplat
