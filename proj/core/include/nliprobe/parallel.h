// Copyright 2026 The nliprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NLIPROBE_PARALLEL_H_
#define NLIPROBE_PARALLEL_H_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace nliprobe {

inline unsigned ResolveWorkers(unsigned workers) {
  if (workers != 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Splits [0, count) into at most `workers` contiguous chunks and runs
// fn(chunk_index, begin, end) for each, one thread per chunk. Chunk
// boundaries depend only on `count` and the resolved worker count. The first
// exception thrown by any chunk is rethrown.
template <typename Fn>
void ParallelChunks(std::size_t count, unsigned workers, Fn&& fn) {
  const std::size_t n_chunks =
      std::max<std::size_t>(1, std::min<std::size_t>(ResolveWorkers(workers),
                                                     count));
  if (n_chunks == 1) {
    fn(std::size_t{0}, std::size_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(n_chunks);
  std::vector<std::thread> threads;
  threads.reserve(n_chunks);
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t begin = count * c / n_chunks;
    const std::size_t end = count * (c + 1) / n_chunks;
    threads.emplace_back([&, c, begin, end] {
      try {
        fn(c, begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace nliprobe

#endif  // NLIPROBE_PARALLEL_H_
