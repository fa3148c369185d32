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

#ifndef NLIPROBE_SUBSPACE_H_
#define NLIPROBE_SUBSPACE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nliprobe/embedding_set.h"
#include "nliprobe/vector_ops.h"

namespace nliprobe {

enum class SubspaceMethod { kPairDifference, kPrincipalComponents, kRandom };

std::string_view SubspaceMethodName(SubspaceMethod method);
SubspaceMethod ParseSubspaceMethod(std::string_view name);

struct Provenance {
  SubspaceMethod method = SubspaceMethod::kPairDifference;
  std::vector<std::string> source_words;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// Orthonormal basis b_1..b_k (1 <= k <= dimension) of a bias subspace.
class BiasSubspace {
 public:
  static constexpr double kOrthonormalityTolerance = 1e-9;

  // Throws kValidation unless the basis is non-empty, every vector has
  // `dimension` finite components, and the basis is orthonormal within
  // kOrthonormalityTolerance.
  BiasSubspace(std::size_t dimension, std::vector<Vector> basis,
               Provenance provenance);

  std::size_t dimension() const { return dimension_; }
  std::size_t rank() const { return basis_.size(); }
  const std::vector<Vector>& basis() const { return basis_; }
  std::span<const double> direction(std::size_t i) const { return basis_[i]; }
  const Provenance& provenance() const { return provenance_; }

  friend bool operator==(const BiasSubspace&, const BiasSubspace&) = default;

 private:
  std::size_t dimension_;
  std::vector<Vector> basis_;
  Provenance provenance_;
};

struct SpectrumReport {
  // Principal values sigma_1 >= ... >= sigma_m of the mean-centred matrix.
  std::vector<double> singular_values;
  // sigma_x / sigma_1 for x = 2..m.
  std::vector<double> ratios;
  // |cos| between the top principal direction and a reference direction.
  std::optional<double> top_alignment;
};

struct PowerIterationOptions {
  // Stop when 1 - |cos(v_t, v_{t-1})| <= tolerance.
  double tolerance = 1e-10;
  int max_iterations = 5000;
  // Inverse-iteration steps applied after convergence, with the Rayleigh
  // quotient as shift.
  int refinement_steps = 2;
};

struct PrincipalComponents {
  // Descending. Entries for numerically null directions are ~0.
  std::vector<double> singular_values;
  // Unit right singular vectors, one per singular value, sign-normalised so
  // the largest-magnitude component is positive.
  std::vector<Vector> directions;
};

// Top `count` principal components of the mean-centred rows (all of equal
// length). Power iteration with deflation on the rows' Gram matrix.
// Throws kNumeric when an iteration exhausts its budget.
PrincipalComponents CenteredPrincipalComponents(
    std::span<const Vector> rows, std::size_t count,
    const PowerIterationOptions& options = {});

// Flips `v` so its largest-magnitude component (first one on ties) is
// positive.
void NormalizeSign(std::span<double> v);

// Unit (v_w1 - v_w2). Throws kLookup for missing words and kNumeric when the
// difference norm is below kDegeneratePairThreshold.
inline constexpr double kDegeneratePairThreshold = 1e-12;
BiasSubspace DirectionFromPair(const EmbeddingSet& set, std::string_view w1,
                               std::string_view w2);

// Top-k principal directions of the mean-centred word vectors.
BiasSubspace PrincipalSubspace(const EmbeddingSet& set,
                               std::span<const std::string> words,
                               std::size_t k,
                               const PowerIterationOptions& options = {});

SpectrumReport Spectrum(const EmbeddingSet& set,
                        std::span<const std::string> words, std::size_t m,
                        const BiasSubspace* reference = nullptr,
                        const PowerIterationOptions& options = {});

// |cos| between the top directions of two subspaces.
double SubspaceAlignment(const BiasSubspace& a, const BiasSubspace& b);

// Seeded, isotropic unit vector (normalised i.i.d. standard normals).
// Portable: the normal draws use Box-Muller over raw mt19937_64 output.
BiasSubspace RandomDirection(std::size_t dimension, std::uint64_t seed);

// JSON document:
//   {"format": "nliprobe.subspace/1", "dimension": d,
//    "basis": [[...], ...],
//    "provenance": {"method": "pair-difference", "source_words": [...],
//                   "seed": null}}
std::string SubspaceToJson(const BiasSubspace& subspace);
BiasSubspace SubspaceFromJson(std::string_view text);
void SaveSubspaceFile(const BiasSubspace& subspace, const std::string& path);
BiasSubspace LoadSubspaceFile(const std::string& path);

}  // namespace nliprobe

#endif  // NLIPROBE_SUBSPACE_H_
