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

#include "nliprobe/debias.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "nliprobe/error.h"
#include "nliprobe/parallel.h"

namespace nliprobe {
namespace {

void CheckDimension(std::size_t got, const BiasSubspace& subspace) {
  if (got != subspace.dimension()) {
    Fail(ErrorCode::kValidation,
         "dimension mismatch: vector has " + std::to_string(got) +
             " components, subspace has " +
             std::to_string(subspace.dimension()));
  }
}

double Residual(std::span<const double> v, const BiasSubspace& subspace) {
  double worst = 0.0;
  for (const Vector& b : subspace.basis()) {
    worst = std::max(worst, std::abs(Dot(v, b)));
  }
  return worst;
}

void CheckResidual(const DebiasRun& run) {
  if (!(run.max_residual <= kMaxDebiasResidual)) {
    Fail(ErrorCode::kNumeric,
         "debias residual " + std::to_string(run.max_residual) +
             " exceeds limit; subspace basis is corrupted");
  }
}

}  // namespace

void ProjectOutInPlace(std::span<double> v, const BiasSubspace& subspace) {
  CheckDimension(v.size(), subspace);
  // Coefficients from the original vector: sum_j <v, b_j> b_j.
  std::vector<double> coefficients;
  coefficients.reserve(subspace.rank());
  for (const Vector& b : subspace.basis()) coefficients.push_back(Dot(v, b));
  for (std::size_t j = 0; j < subspace.rank(); ++j) {
    Axpy(-coefficients[j], subspace.basis()[j], v);
  }
}

Vector ProjectOut(std::span<const double> v, const BiasSubspace& subspace) {
  Vector out(v.begin(), v.end());
  ProjectOutInPlace(out, subspace);
  return out;
}

std::pair<EmbeddingSet, DebiasRun> DebiasAll(const EmbeddingSet& set,
                                             const BiasSubspace& subspace,
                                             unsigned workers) {
  CheckDimension(set.dimension(), subspace);
  const std::size_t d = set.dimension();
  std::vector<double> values = set.values();
  std::vector<double> chunk_residual(
      std::max<std::size_t>(1, ResolveWorkers(workers)), 0.0);
  ParallelChunks(set.size(), workers,
                 [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                   double worst = 0.0;
                   for (std::size_t i = begin; i < end; ++i) {
                     std::span<double> row(values.data() + i * d, d);
                     ProjectOutInPlace(row, subspace);
                     worst = std::max(worst, Residual(row, subspace));
                   }
                   chunk_residual[chunk] = worst;
                 });
  DebiasRun run{subspace, set.size(),
                *std::max_element(chunk_residual.begin(), chunk_residual.end())};
  CheckResidual(run);
  return {set.WithValues(std::move(values)), std::move(run)};
}

std::pair<EmbeddingSet, DebiasRun> DebiasSelected(
    const EmbeddingSet& set, const BiasSubspace& subspace,
    std::span<const std::string> words) {
  CheckDimension(set.dimension(), subspace);
  const std::size_t d = set.dimension();
  std::vector<double> values = set.values();
  std::unordered_set<std::size_t> done;
  DebiasRun run{subspace, 0, 0.0};
  for (const std::string& w : words) {
    const auto row_index = set.find(w);
    if (!row_index) {
      Fail(ErrorCode::kLookup, "word '" + w + "' not in vocabulary");
    }
    if (!done.insert(*row_index).second) continue;
    std::span<double> row(values.data() + *row_index * d, d);
    ProjectOutInPlace(row, subspace);
    run.max_residual = std::max(run.max_residual, Residual(row, subspace));
    ++run.words_modified;
  }
  CheckResidual(run);
  return {set.WithValues(std::move(values)), std::move(run)};
}

std::string DebiasRunToJson(const DebiasRun& run) {
  nlohmann::json doc;
  doc["format"] = "nliprobe.debias-run/1";
  doc["subspace"] = nlohmann::json::parse(SubspaceToJson(run.subspace));
  doc["words_modified"] = run.words_modified;
  doc["max_residual"] = run.max_residual;
  return doc.dump(2) + "\n";
}

}  // namespace nliprobe
