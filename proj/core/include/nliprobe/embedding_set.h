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

#ifndef NLIPROBE_EMBEDDING_SET_H_
#define NLIPROBE_EMBEDDING_SET_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nliprobe/vector_ops.h"

namespace nliprobe {

// Immutable word -> vector table with a fixed dimension. Words keep their
// insertion order and their case; lookup is exact-match.
//
// Vectors are stored row-major in one contiguous buffer. A set can be empty
// (zero entries) but its dimension is always positive.
class EmbeddingSet {
 public:
  // Validates and takes ownership of the rows. `values` holds
  // words.size() * dimension numbers. Throws kValidation on duplicate words,
  // non-finite components, or a size mismatch.
  EmbeddingSet(std::size_t dimension, std::vector<std::string> words,
               std::vector<double> values);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  const std::vector<std::string>& words() const { return words_; }
  const std::string& word(std::size_t row) const { return words_[row]; }

  std::span<const double> row(std::size_t index) const {
    return {values_.data() + index * dimension_, dimension_};
  }

  bool contains(std::string_view word) const;
  std::optional<std::size_t> find(std::string_view word) const;

  // Throws kLookup when the word is absent.
  std::span<const double> at(std::string_view word) const;

  const std::vector<double>& values() const { return values_; }

  // Same vocabulary, new values (same layout as values()).
  EmbeddingSet WithValues(std::vector<double> values) const;

  friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b) {
    return a.dimension_ == b.dimension_ && a.words_ == b.words_ &&
           a.values_ == b.values_;
  }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::size_t dimension_;
  std::vector<std::string> words_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>>
      index_;
};

// One token occurrence of a word with its (contextual) embedding.
struct TokenRecord {
  std::string word;
  Vector vector;
};

// Parses the GloVe-style text format: one `word v1 v2 ... vd` line per entry,
// single-space separated. Blank lines are skipped. The dimension is
// `expected_dimension` when given, else inferred from the first entry.
EmbeddingSet LoadEmbeddings(std::istream& source,
                            std::optional<std::size_t> expected_dimension = {});

EmbeddingSet LoadEmbeddingsFile(const std::string& path,
                                std::optional<std::size_t> expected_dimension = {});

// Writes entries in order, fixed-point with `decimals` fractional digits.
void SaveEmbeddings(const EmbeddingSet& set, std::ostream& sink, int decimals);

void SaveEmbeddingsFile(const EmbeddingSet& set, const std::string& path,
                        int decimals);

// Formats one number the way SaveEmbeddings does (negative zero printed
// without its sign).
std::string FormatFixed(double value, int decimals);

// Averages token vectors into one vector per word type. Output order is
// first-occurrence order. Sums are compensated so the result does not depend
// on token order beyond ~1e-15 relative.
class TypeAggregator {
 public:
  explicit TypeAggregator(std::size_t dimension);

  void Add(std::string_view word, std::span<const double> vector);
  void Add(const TokenRecord& token) { Add(token.word, token.vector); }

  std::size_t token_count() const { return tokens_; }

  // Throws kEmptyInput when no tokens were added.
  EmbeddingSet Finish() const;

 private:
  std::size_t dimension_;
  std::size_t tokens_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<CompensatedSum> sums_;
  std::vector<std::size_t> counts_;
};

EmbeddingSet AggregateTypeEmbeddings(std::span<const TokenRecord> tokens,
                                     std::size_t dimension);

// Reads token records in the embedding text format, where a word may repeat,
// and aggregates them.
EmbeddingSet AggregateTypeEmbeddings(std::istream& tokens,
                                     std::optional<std::size_t> dimension = {});

}  // namespace nliprobe

#endif  // NLIPROBE_EMBEDDING_SET_H_
