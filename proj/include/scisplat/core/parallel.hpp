// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>

namespace scisplat {

/// Global cap on worker threads (0 = hardware concurrency). Set once by the
/// CLI from --threads / SCISPLAT_THREADS before any pipeline work starts.
void set_thread_limit(int threads);
int thread_limit();

/// Runs fn over [0, n) split into one contiguous chunk per worker. Callers
/// must keep results independent of the split (disjoint writes, or per-chunk
/// buffers reduced afterwards in chunk order).
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace scisplat
