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

#ifndef NLIPROBE_TESTS_SUPPORT_TOY_EXPERIMENT_H_
#define NLIPROBE_TESTS_SUPPORT_TOY_EXPERIMENT_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nliprobe/embedding_set.h"
#include "nliprobe/metrics.h"

namespace nliprobe::testing {

inline constexpr std::size_t kToyWords = 200;
inline constexpr std::size_t kToyDimension = 64;

const std::vector<std::string>& ToyOccupations();
const std::vector<std::string>& ToyVerbs();
const std::vector<std::string>& ToyObjects();

// 200 words: every token the toy probe renders, he/she, and filler words.
// A planted gender direction separates he/she and the gendered words, and
// leaks into the occupations with alternating sign.
EmbeddingSet ToyEmbeddings(std::uint64_t seed = 7);

struct ToyRun {
  // Output file name (relative to the run directory) -> bytes. Manifests are
  // left out since they carry timestamps.
  std::map<std::string, std::string> outputs;
  NeutralityReport baseline;
  NeutralityReport projected;
  NeutralityReport control_mean;
  std::vector<NeutralityReport> control_seeds;
  ReportDiff projected_diff;
  ReportDiff control_diff;
  std::string projected_table;
  std::string control_table;
  std::size_t pair_count = 0;
};

// Runs the whole toy pipeline through the CLI in `dir`:
// generate, learn he-she, debias, score, evaluate, control over 8 seeds,
// compare. Throws std::runtime_error if any step exits nonzero.
ToyRun RunToyExperiment(const std::filesystem::path& dir, unsigned workers);

}  // namespace nliprobe::testing

#endif  // NLIPROBE_TESTS_SUPPORT_TOY_EXPERIMENT_H_
