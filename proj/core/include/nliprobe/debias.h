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

#ifndef NLIPROBE_DEBIAS_H_
#define NLIPROBE_DEBIAS_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>

#include "nliprobe/embedding_set.h"
#include "nliprobe/subspace.h"
#include "nliprobe/vector_ops.h"

namespace nliprobe {

// Largest residual |<v', b_j>| a debiased table may carry. Exceeding it means
// the subspace basis was not orthonormal.
inline constexpr double kMaxDebiasResidual = 1e-6;

struct DebiasRun {
  BiasSubspace subspace;
  std::size_t words_modified = 0;
  double max_residual = 0.0;
};

// v' = v - sum_j <v, b_j> b_j
Vector ProjectOut(std::span<const double> v, const BiasSubspace& subspace);

// In-place variant; `v.size()` must equal the subspace dimension.
void ProjectOutInPlace(std::span<double> v, const BiasSubspace& subspace);

// Projects every row. Rows are processed in parallel over `workers` threads
// (0 = hardware concurrency); the output never depends on `workers`.
// Throws kValidation on dimension mismatch and kNumeric if the residual
// exceeds kMaxDebiasResidual.
std::pair<EmbeddingSet, DebiasRun> DebiasAll(const EmbeddingSet& set,
                                             const BiasSubspace& subspace,
                                             unsigned workers = 1);

// Projects only the listed rows; other rows keep their exact bits.
// Throws kLookup for a word not in the set.
std::pair<EmbeddingSet, DebiasRun> DebiasSelected(
    const EmbeddingSet& set, const BiasSubspace& subspace,
    std::span<const std::string> words);

// {"subspace": {...}, "words_modified": n, "max_residual": r}
std::string DebiasRunToJson(const DebiasRun& run);

}  // namespace nliprobe

#endif  // NLIPROBE_DEBIAS_H_
