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

#include "nliprobe/scoring.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "nliprobe/error.h"
#include "nliprobe/parallel.h"
#include "nliprobe/vector_ops.h"

namespace nliprobe {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) ==
           std::tolower(static_cast<unsigned char>(y));
  });
}

Vector MeanTokenVector(std::string_view sentence, const EmbeddingSet& set) {
  Vector mean(set.dimension(), 0.0);
  const std::vector<std::string> tokens = ContentTokens(sentence);
  if (tokens.empty()) return mean;
  for (const std::string& token : tokens) {
    auto row = set.find(token);
    if (!row) {
      std::string lower = token;
      for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      row = set.find(lower);
    }
    if (row) Axpy(1.0, set.row(*row), mean);
  }
  Scale(1.0 / static_cast<double>(tokens.size()), mean);
  return mean;
}

}  // namespace

void ValidateTriple(const PredictionTriple& t, double sum_tolerance) {
  for (const double v : {t.e, t.n, t.c}) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      Fail(ErrorCode::kValidation,
           "triple component " + FormatRoundTrip(v) + " outside [0, 1]");
    }
  }
  const double sum = t.e + t.n + t.c;
  if (std::abs(sum - 1.0) > sum_tolerance) {
    Fail(ErrorCode::kValidation,
         "triple sums to " + FormatRoundTrip(sum) + ", expected 1");
  }
}

PredictionTriple NormalizeTriple(double e, double n, double c) {
  for (const double v : {e, n, c}) {
    if (!std::isfinite(v) || v < 0.0) {
      Fail(ErrorCode::kValidation, "cannot normalise a negative or non-finite weight");
    }
  }
  const double sum = e + n + c;
  if (!(sum > 0.0)) Fail(ErrorCode::kValidation, "cannot normalise zero weights");
  return {e / sum, n / sum, c / sum};
}

std::vector<std::string> ContentTokens(std::string_view sentence) {
  while (!sentence.empty() &&
         (sentence.back() == '.' || sentence.back() == ' ')) {
    sentence.remove_suffix(1);
  }
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < sentence.size()) {
    const std::size_t next = std::min(sentence.find(' ', pos), sentence.size());
    const std::string_view token = sentence.substr(pos, next - pos);
    pos = next + 1;
    if (token.empty()) continue;
    if (EqualsIgnoreCase(token, "the") || EqualsIgnoreCase(token, "a") ||
        EqualsIgnoreCase(token, "an")) {
      continue;
    }
    tokens.emplace_back(token);
  }
  return tokens;
}

PredictionTriple BuiltinTripleFromCosine(double cosine,
                                         const BuiltinScorerParams& params) {
  const double x = params.a * (cosine - params.t);
  // Divide through by the largest weight to keep exp() in range.
  const double m = std::max({x, 0.0, -x});
  return NormalizeTriple(std::exp(x - m), std::exp(-m), std::exp(-x - m));
}

PredictionTriple ScoreBuiltin(const TemplatePair& pair, const EmbeddingSet& set,
                              const BuiltinScorerParams& params) {
  const Vector premise = MeanTokenVector(pair.premise, set);
  const Vector hypothesis = MeanTokenVector(pair.hypothesis, set);
  return BuiltinTripleFromCosine(Cosine(premise, hypothesis), params);
}

PredictionTriple ScoreMock(std::string_view pair_id, std::uint64_t seed) {
  std::uint64_t state = Fnv1a(pair_id) ^ SplitMix64(seed);
  double w[3];
  for (double& x : w) {
    state = SplitMix64(state);
    // (0, 1]
    x = (static_cast<double>(state >> 11) + 1.0) * 0x1.0p-53;
  }
  return NormalizeTriple(w[0], w[1], w[2]);
}

std::vector<ScoredPair> ScoreAll(std::span<const TemplatePair> pairs,
                                 const PairScorer& scorer,
                                 const std::string& scorer_id,
                                 unsigned workers) {
  std::vector<ScoredPair> out(pairs.size());
  ParallelChunks(pairs.size(), workers,
                 [&](std::size_t, std::size_t begin, std::size_t end) {
                   for (std::size_t i = begin; i < end; ++i) {
                     out[i] = ScoredPair{pairs[i].id, scorer(pairs[i]), scorer_id};
                   }
                 });
  return out;
}

std::string FormatRoundTrip(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::string ScoredPairToJsonLine(const ScoredPair& scored) {
  nlohmann::json id = scored.pair_id;
  std::string out = "{\"id\":" + id.dump() + ",\"e\":" +
                    FormatRoundTrip(scored.triple.e) +
                    ",\"n\":" + FormatRoundTrip(scored.triple.n) +
                    ",\"c\":" + FormatRoundTrip(scored.triple.c);
  if (!scored.scorer_id.empty()) {
    out += ",\"scorer\":" + nlohmann::json(scored.scorer_id).dump();
  }
  out += '}';
  return out;
}

ScoredPair ScoredPairFromJsonLine(std::string_view line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    Fail(ErrorCode::kParse, std::string("prediction line: ") + e.what());
  }
  ScoredPair out;
  try {
    out.pair_id = doc.at("id").get<std::string>();
    out.triple = {doc.at("e").get<double>(), doc.at("n").get<double>(),
                  doc.at("c").get<double>()};
    if (doc.contains("scorer")) out.scorer_id = doc["scorer"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kParse, std::string("prediction line: ") + e.what());
  }
  ValidateTriple(out.triple);
  return out;
}

void WritePredictions(std::span<const ScoredPair> scored, std::ostream& out) {
  for (const ScoredPair& s : scored) out << ScoredPairToJsonLine(s) << '\n';
  if (!out) Fail(ErrorCode::kIo, "write failure while writing predictions");
}

std::vector<ScoredPair> ReadPredictions(std::istream& in) {
  std::vector<ScoredPair> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ScoredPairFromJsonLine(line));
    } catch (const Error& e) {
      Fail(e.code(), "line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  if (in.bad()) Fail(ErrorCode::kIo, "read error on prediction stream");
  return out;
}

}  // namespace nliprobe
