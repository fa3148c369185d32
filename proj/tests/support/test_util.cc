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

#include "test_util.h"

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace nliprobe::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("nliprobe-test-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ignored;
  fs::remove_all(path_, ignored);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

Vector GaussianVector(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> normal;
  Vector v(dim);
  for (double& x : v) x = normal(rng);
  return v;
}

Vector UnitVector(std::mt19937_64& rng, std::size_t dim) {
  Vector v = GaussianVector(rng, dim);
  Scale(1.0 / Norm(v), v);
  return v;
}

std::vector<Vector> RandomOrthonormal(std::mt19937_64& rng, std::size_t dim,
                                      std::size_t count) {
  std::vector<Vector> basis;
  while (basis.size() < count) {
    Vector v = GaussianVector(rng, dim);
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& b : basis) Axpy(-Dot(v, b), b, v);
    }
    const double n = Norm(v);
    if (n < 1e-6) continue;
    Scale(1.0 / n, v);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<Vector> RandomRotation(std::mt19937_64& rng, std::size_t dim) {
  return RandomOrthonormal(rng, dim, dim);
}

Vector Rotate(const std::vector<Vector>& rotation, const Vector& v) {
  Vector out(rotation.size());
  for (std::size_t i = 0; i < rotation.size(); ++i) out[i] = Dot(rotation[i], v);
  return out;
}

EmbeddingSet RandomEmbeddingSet(std::mt19937_64& rng, std::size_t words,
                                std::size_t dim) {
  std::vector<std::string> names;
  std::vector<double> values;
  for (std::size_t w = 0; w < words; ++w) {
    names.push_back("w" + std::to_string(w));
    const Vector v = GaussianVector(rng, dim);
    values.insert(values.end(), v.begin(), v.end());
  }
  return EmbeddingSet(dim, std::move(names), std::move(values));
}

const WordLists& BundledLists() {
  static const WordLists lists =
      WordLists::LoadFromDirectory(WordListDirectory(DefaultDataDirectory()));
  return lists;
}

std::vector<TemplatePair> SamplePairs(std::size_t count) {
  const PairGenerator generator(Probe::kNationality, BundledLists());
  std::vector<TemplatePair> pairs;
  pairs.reserve(count);
  const std::uint64_t stride = generator.size() / count;
  for (std::size_t i = 0; i < count; ++i) pairs.push_back(generator.at(i * stride + i % 7));
  return pairs;
}

std::vector<ScoredPair> MockScored(std::span<const TemplatePair> pairs,
                                   std::uint64_t seed) {
  std::vector<ScoredPair> out;
  out.reserve(pairs.size());
  for (const TemplatePair& p : pairs) out.push_back({p.id, ScoreMock(p, seed), "mock"});
  return out;
}

}  // namespace nliprobe::testing
