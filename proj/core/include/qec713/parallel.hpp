// Copyright 2026 The QEC713 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>

namespace qec713 {

/// Worker count: min(hardware_concurrency, QEC713_THREADS) and at least 1.
std::size_t thread_count();

/// Runs fn over disjoint index ranges [begin, end). Results must not depend
/// on how the range is split; no reductions happen here, so output is
/// identical for any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

/// Splits [0, n) into fixed-size chunks (independent of the worker count),
/// calls work(chunk_index, begin, end) possibly concurrently, then merge(chunk_index)
/// sequentially in ascending chunk order. Reductions staged this way are
/// bitwise reproducible for any thread count.
void parallel_chunked(std::size_t n, std::size_t chunk_size,
                      const std::function<void(std::size_t, std::size_t, std::size_t)>& work,
                      const std::function<void(std::size_t)>& merge);

}  // namespace qec713
