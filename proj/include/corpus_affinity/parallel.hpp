// parallel.hpp
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
//
// Copyright 2026 The corpus-affinity Authors.
//
// Minimal fork-join helpers. Work is split into contiguous index ranges so
// callers can write results into pre-sized slots and reduce in index order.

#ifndef CORPUS_AFFINITY_PARALLEL_HPP_
#define CORPUS_AFFINITY_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace corpus_affinity {

inline constexpr const char* kThreadsEnvVar = "CORPUS_AFFINITY_THREADS";

// Explicit request wins, then CORPUS_AFFINITY_THREADS, then the hardware
// concurrency. Always at least 1.
int resolve_threads(std::optional<int> requested);

// Calls fn(shard, begin, end) for `shards` contiguous ranges covering
// [0, n). Exceptions from workers are rethrown on the calling thread.
template <typename Fn>
void parallel_shards(std::size_t n, int shards, Fn&& fn) {
  shards = std::max(1, shards);
  if (shards == 1 || n <= 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::size_t count = std::min<std::size_t>(shards, n);
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> workers;
  workers.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    std::size_t begin = n * s / count;
    std::size_t end = n * (s + 1) / count;
    workers.emplace_back([&, s, begin, end] {
      try {
        fn(s, begin, end);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  parallel_shards(n, threads, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fn(i);
  });
}

}  // namespace corpus_affinity

#endif  // CORPUS_AFFINITY_PARALLEL_HPP_
