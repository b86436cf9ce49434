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

#include "qec713/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace qec713 {

std::size_t thread_count() {
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("QEC713_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0 && static_cast<std::size_t>(cap) < n) {
      n = static_cast<std::size_t>(cap);
    }
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  const std::size_t workers = thread_count();
  if (n == 0) return;
  if (workers == 1 || n < 1024) {
    fn(0, n);
    return;
  }
  // Fixed-size chunks so splits do not depend on the worker count.
  const std::size_t chunk = 4096;
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= n_chunks) break;
      std::size_t b = k * chunk;
      std::size_t e = std::min(n, b + chunk);
      fn(b, e);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
}

void parallel_chunked(std::size_t n, std::size_t chunk_size,
                      const std::function<void(std::size_t, std::size_t, std::size_t)>& work,
                      const std::function<void(std::size_t)>& merge) {
  if (n == 0) return;
  const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
  const std::size_t workers = std::min(thread_count(), n_chunks);
  if (workers == 1) {
    for (std::size_t k = 0; k < n_chunks; ++k) {
      work(k, k * chunk_size, std::min(n, (k + 1) * chunk_size));
      merge(k);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= n_chunks) break;
      work(k, k * chunk_size, std::min(n, (k + 1) * chunk_size));
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  for (std::size_t k = 0; k < n_chunks; ++k) merge(k);
}

}  // namespace qec713
