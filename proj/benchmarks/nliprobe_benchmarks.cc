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

#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "nliprobe/debias.h"
#include "nliprobe/metrics.h"
#include "nliprobe/scoring.h"
#include "nliprobe/subspace.h"
#include "nliprobe/templates.h"

namespace nliprobe {
namespace {

EmbeddingSet RandomSet(std::size_t words, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::string> names;
  std::vector<double> values(words * dim);
  for (std::size_t w = 0; w < words; ++w) names.push_back("w" + std::to_string(w));
  for (double& v : values) v = normal(rng);
  return EmbeddingSet(dim, std::move(names), std::move(values));
}

const WordLists& Lists() {
  static const WordLists lists =
      WordLists::LoadFromDirectory(WordListDirectory(DefaultDataDirectory()));
  return lists;
}

void BM_ProjectOut(benchmark::State& state) {
  const std::size_t dim = static_cast<std::size_t>(state.range(0));
  const BiasSubspace s = RandomDirection(dim, 1);
  Vector v(dim, 0.5);
  for (auto _ : state) {
    ProjectOutInPlace(v, s);
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_ProjectOut)->Arg(50)->Arg(300)->Arg(1024);

void BM_DebiasAll(benchmark::State& state) {
  const EmbeddingSet set = RandomSet(static_cast<std::size_t>(state.range(0)), 300, 2);
  const BiasSubspace s = RandomDirection(300, 3);
  for (auto _ : state) benchmark::DoNotOptimize(DebiasAll(set, s, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DebiasAll)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_PrincipalSubspace(benchmark::State& state) {
  const EmbeddingSet set = RandomSet(static_cast<std::size_t>(state.range(0)), 300, 4);
  for (auto _ : state) benchmark::DoNotOptimize(PrincipalSubspace(set, set.words(), 3));
}
BENCHMARK(BM_PrincipalSubspace)->Arg(8)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_GeneratePairs(benchmark::State& state) {
  const PairGenerator gen(Probe::kNationality, Lists());
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen.at(i));
    i = (i + 7919) % gen.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GeneratePairs);

void BM_WritePairs(benchmark::State& state) {
  const PairGenerator gen(Probe::kNationality, Lists());
  for (auto _ : state) {
    std::ostringstream out;
    WritePairs(gen, 0, 100000, out);
    benchmark::DoNotOptimize(out.str().size());
  }
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_WritePairs)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  const PairGenerator gen(Probe::kReligion, Lists());
  std::vector<ScoredPair> scored;
  for (std::uint64_t i = 0; i < 200000; ++i) {
    const TemplatePair p = gen.at(i);
    scored.push_back({p.id, ScoreMock(p, 1), "mock"});
  }
  EvaluateOptions options;
  options.top_k = 10;
  options.group_filters = {SlotFilter::Parse("premise=evil")};
  options.workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Evaluate(scored, PairIndex(), "religion", "mock", options));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scored.size()));
}
BENCHMARK(BM_Evaluate)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ScoreBuiltin(benchmark::State& state) {
  const PairGenerator gen(Probe::kReligion, Lists());
  std::vector<std::string> words;
  std::vector<double> values;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  const TemplatePair sample = gen.at(0);
  for (const auto& t : ContentTokens(sample.premise + " " + sample.hypothesis)) {
    if (std::find(words.begin(), words.end(), t) != words.end()) continue;
    words.push_back(t);
    for (int d = 0; d < 300; ++d) values.push_back(normal(rng));
  }
  const EmbeddingSet set(300, words, values);
  for (auto _ : state) benchmark::DoNotOptimize(ScoreBuiltin(sample, set));
}
BENCHMARK(BM_ScoreBuiltin);

}  // namespace
}  // namespace nliprobe

BENCHMARK_MAIN();
