// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/train/adam.hpp"

#include <cmath>

#include "scisplat/core/errors.hpp"

namespace scisplat {

void adam_update(AdamState& state, const double* grad, double* params, std::size_t n, double lr,
                 int step_index) {
  if (state.size() != n) throw ShapeMismatch("adam state does not match parameter group");
  const double bias1 = 1.0 - std::pow(kAdamBeta1, step_index);
  const double bias2 = 1.0 - std::pow(kAdamBeta2, step_index);
  for (std::size_t k = 0; k < n; ++k) {
    state.m[k] = kAdamBeta1 * state.m[k] + (1.0 - kAdamBeta1) * grad[k];
    state.v[k] = kAdamBeta2 * state.v[k] + (1.0 - kAdamBeta2) * grad[k] * grad[k];
    const double m_hat = state.m[k] / bias1;
    const double v_hat = state.v[k] / bias2;
    params[k] -= lr * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
  }
}

}  // namespace scisplat
