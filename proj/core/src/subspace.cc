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

#include "nliprobe/subspace.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "nliprobe/error.h"

namespace nliprobe {
namespace {

using Json = nlohmann::json;

// Dense symmetric n x n matrix, row-major.
struct SymmetricMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  void Multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = Dot({a.data() + i * n, n}, x);
    }
  }
};

void OrthogonalizeAgainst(std::span<double> v, std::span<const Vector> basis) {
  // Two passes of modified Gram-Schmidt.
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vector& b : basis) Axpy(-Dot(b, v), b, v);
  }
}

// Solves (A - shift*I) y = rhs by Gaussian elimination with partial pivoting.
// Zero pivots are nudged so a shift sitting exactly on an eigenvalue still
// yields a (huge) solution along the eigenvector.
Vector ShiftedSolve(const SymmetricMatrix& a, double shift,
                    std::span<const double> rhs, double scale) {
  const std::size_t n = a.n;
  std::vector<double> m(a.a);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] -= shift;
  Vector y(rhs.begin(), rhs.end());
  const double tiny = std::numeric_limits<double>::epsilon() * scale;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[r * n + col]) > std::abs(m[pivot * n + col])) pivot = r;
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m[col * n + c], m[pivot * n + c]);
      std::swap(y[col], y[pivot]);
    }
    double& diag = m[col * n + col];
    if (std::abs(diag) < tiny) diag = diag < 0 ? -tiny : tiny;
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[r * n + col] / diag;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) m[r * n + c] -= f * m[col * n + c];
      y[r] -= f * y[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= m[i * n + c] * y[c];
    y[i] = s / m[i * n + i];
  }
  return y;
}

Vector StartVector(std::size_t n, std::uint64_t stream) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ (stream * 0x2545f4914f6cdd1dULL));
  Vector v(n);
  for (double& x : v) {
    x = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  }
  return v;
}

std::vector<Vector> CollectRows(const EmbeddingSet& set,
                                std::span<const std::string> words) {
  std::vector<Vector> rows;
  rows.reserve(words.size());
  for (const std::string& w : words) {
    const auto v = set.at(w);
    rows.emplace_back(v.begin(), v.end());
  }
  return rows;
}

void CheckWordSet(const EmbeddingSet& set, std::span<const std::string> words,
                  std::size_t k, std::string_view what) {
  for (const std::string& w : words) set.at(w);
  if (words.size() < 2) {
    Fail(ErrorCode::kValidation, "at least 2 words are required");
  }
  const std::size_t limit = std::min(set.dimension(), words.size());
  if (k == 0 || k > limit) {
    Fail(ErrorCode::kValidation,
         std::string(what) + " = " + std::to_string(k) +
             " out of range [1, " + std::to_string(limit) + "]");
  }
}

}  // namespace

std::string_view SubspaceMethodName(SubspaceMethod method) {
  switch (method) {
    case SubspaceMethod::kPairDifference:
      return "pair-difference";
    case SubspaceMethod::kPrincipalComponents:
      return "principal-components";
    case SubspaceMethod::kRandom:
      return "random";
  }
  return "unknown";
}

SubspaceMethod ParseSubspaceMethod(std::string_view name) {
  if (name == "pair-difference") return SubspaceMethod::kPairDifference;
  if (name == "principal-components") return SubspaceMethod::kPrincipalComponents;
  if (name == "random") return SubspaceMethod::kRandom;
  Fail(ErrorCode::kParse, "unknown subspace method '" + std::string(name) + "'");
}

BiasSubspace::BiasSubspace(std::size_t dimension, std::vector<Vector> basis,
                           Provenance provenance)
    : dimension_(dimension),
      basis_(std::move(basis)),
      provenance_(std::move(provenance)) {
  if (dimension_ == 0) {
    Fail(ErrorCode::kValidation, "subspace dimension must be positive");
  }
  if (basis_.empty()) Fail(ErrorCode::kValidation, "subspace basis is empty");
  if (basis_.size() > dimension_) {
    Fail(ErrorCode::kValidation, "subspace rank exceeds its dimension");
  }
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (basis_[i].size() != dimension_) {
      Fail(ErrorCode::kValidation, "basis vector " + std::to_string(i) +
                                       " has wrong length");
    }
    if (!AllFinite(basis_[i])) {
      Fail(ErrorCode::kValidation, "basis vector has non-finite components");
    }
    if (std::abs(Norm(basis_[i]) - 1.0) > kOrthonormalityTolerance) {
      Fail(ErrorCode::kValidation,
           "basis vector " + std::to_string(i) + " is not unit norm");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(Dot(basis_[i], basis_[j])) > kOrthonormalityTolerance) {
        Fail(ErrorCode::kValidation, "basis vectors " + std::to_string(j) +
                                         " and " + std::to_string(i) +
                                         " are not orthogonal");
      }
    }
  }
}

void NormalizeSign(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (!v.empty() && v[best] < 0) Scale(-1.0, v);
}

PrincipalComponents CenteredPrincipalComponents(
    std::span<const Vector> rows, std::size_t count,
    const PowerIterationOptions& options) {
  const std::size_t n = rows.size();
  if (n == 0) Fail(ErrorCode::kValidation, "no rows");
  const std::size_t d = rows.front().size();
  for (const Vector& r : rows) {
    if (r.size() != d) Fail(ErrorCode::kValidation, "ragged rows");
  }
  if (count > std::min(n, d)) {
    Fail(ErrorCode::kValidation, "too many components requested");
  }

  Vector mean(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    CompensatedSum s;
    for (const Vector& r : rows) s.Add(r[j]);
    mean[j] = s.value() / static_cast<double>(n);
  }
  std::vector<Vector> centered(rows.begin(), rows.end());
  for (Vector& r : centered) Axpy(-1.0, mean, r);

  SymmetricMatrix gram{n, std::vector<double>(n * n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      gram(i, j) = gram(j, i) = Dot(centered[i], centered[j]);
    }
  }
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += gram(i, i);

  PrincipalComponents out;
  std::vector<Vector> left;  // eigenvectors of the Gram matrix found so far
  SymmetricMatrix deflated = gram;
  double top_eigenvalue = 0.0;
  Vector w(n);

  for (std::size_t c = 0; c < count; ++c) {
    Vector v = StartVector(n, c);
    OrthogonalizeAgainst(v, left);
    double nv = Norm(v);
    for (std::uint64_t retry = 1; nv == 0.0 && retry < 8; ++retry) {
      v = StartVector(n, c + 1000 * retry);
      OrthogonalizeAgainst(v, left);
      nv = Norm(v);
    }
    Scale(1.0 / nv, v);

    // Everything left is numerically null once the deflated matrix maps the
    // iterate to (almost) nothing.
    const double null_floor =
        1e-12 * (c == 0 ? trace : top_eigenvalue);
    bool null_direction = trace == 0.0;
    bool converged = null_direction;
    for (int it = 0; !converged && it < options.max_iterations; ++it) {
      deflated.Multiply(v, w);
      OrthogonalizeAgainst(w, left);
      const double nw = Norm(w);
      if (nw <= null_floor) {
        null_direction = true;
        break;
      }
      Scale(1.0 / nw, w);
      const double cosine = std::abs(Dot(w, v));
      // Keep the sign stable between iterates.
      if (Dot(w, v) < 0) Scale(-1.0, w);
      v.swap(w);
      converged = 1.0 - cosine <= options.tolerance;
    }
    if (!converged && !null_direction) {
      Fail(ErrorCode::kNumeric,
           "power iteration did not converge for component " +
               std::to_string(c + 1) + " within " +
               std::to_string(options.max_iterations) + " iterations");
    }

    if (!null_direction) {
      const double scale = std::max(trace, 1e-300);
      for (int step = 0; step < options.refinement_steps; ++step) {
        deflated.Multiply(v, w);
        const double shift = Dot(v, w);
        Vector y = ShiftedSolve(deflated, shift, v, scale);
        OrthogonalizeAgainst(y, left);
        const double ny = Norm(y);
        if (!(ny > 0.0) || !std::isfinite(ny)) break;
        Scale(1.0 / ny, y);
        if (std::abs(Dot(y, v)) < 0.9) break;  // jumped to another eigenpair
        if (Dot(y, v) < 0) Scale(-1.0, y);
        v.swap(y);
      }
    }

    // Right singular vector and value straight from the centred rows.
    Vector direction(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) Axpy(v[i], centered[i], direction);
    const double sigma = Norm(direction);
    if (c == 0) top_eigenvalue = sigma * sigma;

    deflated.Multiply(v, w);
    const double eigenvalue = Dot(v, w);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        deflated(i, j) -= eigenvalue * v[i] * v[j];
      }
    }
    left.push_back(v);

    OrthogonalizeAgainst(direction, out.directions);
    const double nd = Norm(direction);
    if (nd > 0.0) {
      Scale(1.0 / nd, direction);
    }
    NormalizeSign(direction);
    out.singular_values.push_back(sigma);
    out.directions.push_back(std::move(direction));
  }
  return out;
}

BiasSubspace DirectionFromPair(const EmbeddingSet& set, std::string_view w1,
                               std::string_view w2) {
  const auto a = set.at(w1);
  const auto b = set.at(w2);
  Vector diff(a.begin(), a.end());
  Axpy(-1.0, b, diff);
  const double norm = Norm(diff);
  if (norm < kDegeneratePairThreshold) {
    Fail(ErrorCode::kNumeric, "degenerate direction: '" + std::string(w1) +
                                  "' and '" + std::string(w2) +
                                  "' have (nearly) identical vectors");
  }
  Scale(1.0 / norm, diff);
  return BiasSubspace(
      set.dimension(), {std::move(diff)},
      Provenance{SubspaceMethod::kPairDifference,
                 {std::string(w1), std::string(w2)},
                 std::nullopt});
}

BiasSubspace PrincipalSubspace(const EmbeddingSet& set,
                               std::span<const std::string> words,
                               std::size_t k,
                               const PowerIterationOptions& options) {
  CheckWordSet(set, words, k, "k");
  const std::vector<Vector> rows = CollectRows(set, words);
  PrincipalComponents pcs = CenteredPrincipalComponents(rows, k, options);
  const double top = pcs.singular_values.front();
  for (std::size_t i = 0; i < k; ++i) {
    if (!(top > 0.0) || pcs.singular_values[i] <= 1e-12 * top) {
      Fail(ErrorCode::kNumeric,
           "word set spans fewer than " + std::to_string(k) +
               " principal directions after mean-centring");
    }
  }
  return BiasSubspace(
      set.dimension(), std::move(pcs.directions),
      Provenance{SubspaceMethod::kPrincipalComponents,
                 std::vector<std::string>(words.begin(), words.end()),
                 std::nullopt});
}

SpectrumReport Spectrum(const EmbeddingSet& set,
                        std::span<const std::string> words, std::size_t m,
                        const BiasSubspace* reference,
                        const PowerIterationOptions& options) {
  CheckWordSet(set, words, m, "m");
  if (reference != nullptr && reference->dimension() != set.dimension()) {
    Fail(ErrorCode::kValidation, "reference subspace dimension mismatch");
  }
  const std::vector<Vector> rows = CollectRows(set, words);
  PrincipalComponents pcs = CenteredPrincipalComponents(rows, m, options);
  const double top = pcs.singular_values.front();
  if (!(top > 0.0)) {
    Fail(ErrorCode::kNumeric, "all word vectors coincide; spectrum undefined");
  }
  SpectrumReport report;
  report.singular_values = pcs.singular_values;
  for (std::size_t x = 1; x < m; ++x) {
    report.ratios.push_back(std::clamp(pcs.singular_values[x] / top, 0.0, 1.0));
  }
  // Power iteration finds values in descending order up to round-off.
  for (std::size_t x = 1; x < report.ratios.size(); ++x) {
    report.ratios[x] = std::min(report.ratios[x], report.ratios[x - 1]);
  }
  if (reference != nullptr) {
    report.top_alignment = std::min(
        1.0, std::abs(Dot(pcs.directions.front(), reference->direction(0))));
  }
  return report;
}

double SubspaceAlignment(const BiasSubspace& a, const BiasSubspace& b) {
  if (a.dimension() != b.dimension()) {
    Fail(ErrorCode::kValidation, "subspace dimension mismatch (" +
                                     std::to_string(a.dimension()) + " vs " +
                                     std::to_string(b.dimension()) + ")");
  }
  return std::min(1.0, std::abs(Dot(a.direction(0), b.direction(0))));
}

BiasSubspace RandomDirection(std::size_t dimension, std::uint64_t seed) {
  if (dimension == 0) Fail(ErrorCode::kUsage, "dimension must be positive");
  std::mt19937_64 rng(seed);
  auto uniform_open = [&rng] {
    // (0, 1]: never zero, so log() below is finite.
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  };
  Vector v(dimension);
  double norm = 0.0;
  do {
    for (std::size_t i = 0; i < dimension; i += 2) {
      const double r = std::sqrt(-2.0 * std::log(uniform_open()));
      const double theta = 2.0 * M_PI * uniform_open();
      v[i] = r * std::cos(theta);
      if (i + 1 < dimension) v[i + 1] = r * std::sin(theta);
    }
    norm = Norm(v);
  } while (norm == 0.0);
  Scale(1.0 / norm, v);
  return BiasSubspace(dimension, {std::move(v)},
                      Provenance{SubspaceMethod::kRandom, {}, seed});
}

std::string SubspaceToJson(const BiasSubspace& subspace) {
  Json doc;
  doc["format"] = "nliprobe.subspace/1";
  doc["dimension"] = subspace.dimension();
  doc["basis"] = subspace.basis();
  const Provenance& p = subspace.provenance();
  doc["provenance"]["method"] = SubspaceMethodName(p.method);
  doc["provenance"]["source_words"] = p.source_words;
  doc["provenance"]["seed"] =
      p.seed ? Json(*p.seed) : Json(nullptr);
  return doc.dump(2) + "\n";
}

BiasSubspace SubspaceFromJson(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kParse, std::string("subspace JSON: ") + e.what());
  }
  try {
    if (doc.value("format", "") != "nliprobe.subspace/1") {
      Fail(ErrorCode::kParse, "subspace JSON: unsupported or missing format");
    }
    Provenance p;
    const Json& prov = doc.at("provenance");
    p.method = ParseSubspaceMethod(prov.at("method").get<std::string>());
    p.source_words = prov.value("source_words", std::vector<std::string>{});
    if (prov.contains("seed") && !prov.at("seed").is_null()) {
      p.seed = prov.at("seed").get<std::uint64_t>();
    }
    return BiasSubspace(doc.at("dimension").get<std::size_t>(),
                        doc.at("basis").get<std::vector<Vector>>(),
                        std::move(p));
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kParse, std::string("subspace JSON: ") + e.what());
  }
}

void SaveSubspaceFile(const BiasSubspace& subspace, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << SubspaceToJson(subspace);
  if (!out) Fail(ErrorCode::kIo, "write failure on '" + path + "'");
}

BiasSubspace LoadSubspaceFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return SubspaceFromJson(buffer.str());
}

}  // namespace nliprobe
