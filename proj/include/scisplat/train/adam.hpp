// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace scisplat {

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

/// First/second moment buffers for one flattened parameter group.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;

  void resize(std::size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
  }
  std::size_t size() const { return m.size(); }

  /// Zeroes the moment rows [offset, offset + count): relocated Gaussians
  /// restart from clean optimizer state.
  void reset_rows(std::size_t offset, std::size_t count) {
    for (std::size_t k = offset; k < offset + count && k < m.size(); ++k) {
      m[k] = 0.0;
      v[k] = 0.0;
    }
  }

  void append_zero_rows(std::size_t count) {
    m.resize(m.size() + count, 0.0);
    v.resize(v.size() + count, 0.0);
  }
};

/// One Adam update over a flattened group; step_index is 1-based for the
/// bias correction. Writes the update into params.
void adam_update(AdamState& state, const double* grad, double* params, std::size_t n, double lr,
                 int step_index);

}  // namespace scisplat
