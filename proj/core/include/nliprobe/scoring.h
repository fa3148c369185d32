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

#ifndef NLIPROBE_SCORING_H_
#define NLIPROBE_SCORING_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nliprobe/embedding_set.h"
#include "nliprobe/templates.h"

namespace nliprobe {

// Entail / neutral / contradict probabilities of one pair.
struct PredictionTriple {
  double e = 0.0;
  double n = 0.0;
  double c = 0.0;

  friend bool operator==(const PredictionTriple&, const PredictionTriple&) = default;
};

inline constexpr double kTripleSumTolerance = 1e-6;

// Throws kValidation unless each component is in [0, 1] and they sum to 1
// within `sum_tolerance`.
void ValidateTriple(const PredictionTriple& t,
                    double sum_tolerance = kTripleSumTolerance);

// Divides by the sum. Throws kValidation for negative, non-finite, or
// all-zero input.
PredictionTriple NormalizeTriple(double e, double n, double c);

struct ScoredPair {
  std::string pair_id;
  PredictionTriple triple;
  std::string scorer_id;
};

// ---------------------------------------------------------------------------
// Builtin heuristic scorer. Deterministic stand-in used to run the pipeline
// without a trained NLI model; it models nothing beyond embedding geometry.
//
// With c the cosine between the mean token vectors of premise and hypothesis:
//   raw = (exp(a (c - t)), 1, exp(-a (c - t)))   for (e, n, c-label)
// normalised to sum 1. The neutral probability never exceeds 1/3.
struct BuiltinScorerParams {
  double a = 5.0;
  double t = 0.5;
};

// Lower-cases nothing; splits on spaces, strips the final period, and drops
// the articles "the", "a", "an" (any case).
std::vector<std::string> ContentTokens(std::string_view sentence);

PredictionTriple BuiltinTripleFromCosine(double cosine,
                                         const BuiltinScorerParams& params = {});

// Tokens are looked up exactly, then lower-cased; unknown tokens count as the
// zero vector.
PredictionTriple ScoreBuiltin(const TemplatePair& pair, const EmbeddingSet& set,
                              const BuiltinScorerParams& params = {});

// Hash-seeded triple; a pure function of (pair id, seed).
PredictionTriple ScoreMock(std::string_view pair_id, std::uint64_t seed);
inline PredictionTriple ScoreMock(const TemplatePair& pair, std::uint64_t seed) {
  return ScoreMock(pair.id, seed);
}

using PairScorer = std::function<PredictionTriple(const TemplatePair&)>;

// Applies a pure scorer to every pair over `workers` threads (0 = hardware
// concurrency). Output is in input order and independent of `workers`.
std::vector<ScoredPair> ScoreAll(std::span<const TemplatePair> pairs,
                                 const PairScorer& scorer,
                                 const std::string& scorer_id,
                                 unsigned workers = 1);

// ---------------------------------------------------------------------------
// Prediction files: one {"id":..,"e":..,"n":..,"c":..} object per line, with
// an optional "scorer" field. Numbers are written in shortest round-trip
// form so files are byte-stable.
std::string ScoredPairToJsonLine(const ScoredPair& scored);
ScoredPair ScoredPairFromJsonLine(std::string_view line);
void WritePredictions(std::span<const ScoredPair> scored, std::ostream& out);
// Blank lines skipped; errors name the line.
std::vector<ScoredPair> ReadPredictions(std::istream& in);

// Shortest representation that parses back to the same double.
std::string FormatRoundTrip(double value);

}  // namespace nliprobe

#endif  // NLIPROBE_SCORING_H_
