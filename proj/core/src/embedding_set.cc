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

#include "nliprobe/embedding_set.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <utility>

#include "nliprobe/error.h"

namespace nliprobe {
namespace {

struct ParsedLine {
  std::string_view word;
  std::vector<double> values;
};

std::string LineContext(std::size_t line_number) {
  return "line " + std::to_string(line_number);
}

// Splits `word v1 ... vd` on single spaces. Trailing whitespace (including a
// CR from CRLF files) is ignored.
ParsedLine ParseLine(std::string_view line, std::size_t line_number) {
  while (!line.empty() && (line.back() == ' ' || line.back() == '\r' ||
                           line.back() == '\t')) {
    line.remove_suffix(1);
  }
  ParsedLine parsed;
  std::size_t pos = line.find(' ');
  parsed.word = line.substr(0, pos);
  if (parsed.word.empty()) {
    Fail(ErrorCode::kParse, LineContext(line_number) + ": missing word");
  }
  if (parsed.word.find('\t') != std::string_view::npos) {
    Fail(ErrorCode::kParse, LineContext(line_number) + ": word contains a tab");
  }
  while (pos != std::string_view::npos) {
    const std::size_t start = pos + 1;
    pos = line.find(' ', start);
    const std::string_view field =
        line.substr(start, pos == std::string_view::npos ? pos : pos - start);
    if (field.empty()) {
      Fail(ErrorCode::kParse,
           LineContext(line_number) + ": empty field (double space)");
    }
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      Fail(ErrorCode::kParse, LineContext(line_number) +
                                  ": non-numeric component '" +
                                  std::string(field) + "'");
    }
    if (!std::isfinite(value)) {
      Fail(ErrorCode::kParse, LineContext(line_number) +
                                  ": non-finite component '" +
                                  std::string(field) + "'");
    }
    parsed.values.push_back(value);
  }
  return parsed;
}

// Calls `sink(word, values, line_number)` for every non-blank line after
// checking the dimension. Returns the dimension used.
template <typename Sink>
std::size_t ForEachEntry(std::istream& source,
                         std::optional<std::size_t> expected_dimension,
                         Sink&& sink) {
  if (expected_dimension && *expected_dimension == 0) {
    Fail(ErrorCode::kUsage, "expected dimension must be positive");
  }
  std::optional<std::size_t> dimension = expected_dimension;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(source, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ParsedLine parsed = ParseLine(line, line_number);
    if (!dimension) {
      if (parsed.values.empty()) {
        Fail(ErrorCode::kParse, LineContext(line_number) + ": no components");
      }
      dimension = parsed.values.size();
    }
    if (parsed.values.size() != *dimension) {
      Fail(ErrorCode::kParse,
           LineContext(line_number) + ": dimension mismatch (expected " +
               std::to_string(*dimension) + ", got " +
               std::to_string(parsed.values.size()) + ")");
    }
    sink(parsed.word, parsed.values, line_number);
  }
  if (source.bad()) Fail(ErrorCode::kIo, "read error on embedding stream");
  if (!dimension) Fail(ErrorCode::kEmptyInput, "empty embedding input");
  return *dimension;
}

std::ifstream OpenForRead(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

EmbeddingSet::EmbeddingSet(std::size_t dimension,
                           std::vector<std::string> words,
                           std::vector<double> values)
    : dimension_(dimension),
      words_(std::move(words)),
      values_(std::move(values)) {
  if (dimension_ == 0) {
    Fail(ErrorCode::kValidation, "embedding dimension must be positive");
  }
  if (values_.size() != words_.size() * dimension_) {
    Fail(ErrorCode::kValidation, "embedding value buffer has wrong size");
  }
  if (!AllFinite(values_)) {
    Fail(ErrorCode::kValidation, "embedding contains non-finite components");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      Fail(ErrorCode::kValidation, "duplicate word '" + words_[i] + "'");
    }
  }
}

bool EmbeddingSet::contains(std::string_view word) const {
  return index_.find(word) != index_.end();
}

std::optional<std::size_t> EmbeddingSet::find(std::string_view word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> EmbeddingSet::at(std::string_view word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) {
    Fail(ErrorCode::kLookup, "word '" + std::string(word) + "' not in vocabulary");
  }
  return row(it->second);
}

EmbeddingSet EmbeddingSet::WithValues(std::vector<double> values) const {
  return EmbeddingSet(dimension_, words_, std::move(values));
}

EmbeddingSet LoadEmbeddings(std::istream& source,
                            std::optional<std::size_t> expected_dimension) {
  std::vector<std::string> words;
  std::vector<double> values;
  std::unordered_map<std::string, std::size_t> seen;
  const std::size_t dimension = ForEachEntry(
      source, expected_dimension,
      [&](std::string_view word, const std::vector<double>& row,
          std::size_t line_number) {
        auto [it, inserted] = seen.emplace(std::string(word), line_number);
        if (!inserted) {
          Fail(ErrorCode::kParse,
               LineContext(line_number) + ": duplicate word '" +
                   std::string(word) + "' (first seen on line " +
                   std::to_string(it->second) + ")");
        }
        words.emplace_back(word);
        values.insert(values.end(), row.begin(), row.end());
      });
  return EmbeddingSet(dimension, std::move(words), std::move(values));
}

EmbeddingSet LoadEmbeddingsFile(const std::string& path,
                                std::optional<std::size_t> expected_dimension) {
  std::ifstream in = OpenForRead(path);
  try {
    return LoadEmbeddings(in, expected_dimension);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string FormatFixed(double value, int decimals) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                       std::chars_format::fixed, decimals);
  std::string out(buffer, ec == std::errc() ? ptr : buffer);
  if (ec != std::errc()) {
    // Huge magnitudes overflow the buffer; fall back to iostream formatting.
    out = std::to_string(value);
  }
  if (!out.empty() && out.front() == '-' &&
      out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);
  }
  return out;
}

void SaveEmbeddings(const EmbeddingSet& set, std::ostream& sink, int decimals) {
  if (decimals <= 0) Fail(ErrorCode::kUsage, "decimals must be positive");
  std::string line;
  for (std::size_t i = 0; i < set.size(); ++i) {
    line = set.word(i);
    for (double v : set.row(i)) {
      line += ' ';
      line += FormatFixed(v, decimals);
    }
    line += '\n';
    sink << line;
    if (!sink) Fail(ErrorCode::kIo, "write failure while saving embeddings");
  }
  sink.flush();
  if (!sink) Fail(ErrorCode::kIo, "write failure while saving embeddings");
}

void SaveEmbeddingsFile(const EmbeddingSet& set, const std::string& path,
                        int decimals) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  SaveEmbeddings(set, out, decimals);
}

TypeAggregator::TypeAggregator(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) Fail(ErrorCode::kUsage, "dimension must be positive");
}

void TypeAggregator::Add(std::string_view word, std::span<const double> vector) {
  if (vector.size() != dimension_) {
    Fail(ErrorCode::kValidation,
         "token '" + std::string(word) + "' has dimension " +
             std::to_string(vector.size()) + ", expected " +
             std::to_string(dimension_));
  }
  if (!AllFinite(vector)) {
    Fail(ErrorCode::kValidation,
         "token '" + std::string(word) + "' has non-finite components");
  }
  auto [it, inserted] = index_.emplace(std::string(word), words_.size());
  if (inserted) {
    words_.emplace_back(word);
    sums_.resize(sums_.size() + dimension_);
    counts_.push_back(0);
  }
  const std::size_t row = it->second;
  CompensatedSum* sums = sums_.data() + row * dimension_;
  for (std::size_t j = 0; j < dimension_; ++j) sums[j].Add(vector[j]);
  ++counts_[row];
  ++tokens_;
}

EmbeddingSet TypeAggregator::Finish() const {
  if (tokens_ == 0) Fail(ErrorCode::kEmptyInput, "empty token stream");
  std::vector<double> values(words_.size() * dimension_);
  for (std::size_t row = 0; row < words_.size(); ++row) {
    const double count = static_cast<double>(counts_[row]);
    for (std::size_t j = 0; j < dimension_; ++j) {
      values[row * dimension_ + j] = sums_[row * dimension_ + j].value() / count;
    }
  }
  return EmbeddingSet(dimension_, words_, std::move(values));
}

EmbeddingSet AggregateTypeEmbeddings(std::span<const TokenRecord> tokens,
                                     std::size_t dimension) {
  TypeAggregator aggregator(dimension);
  for (const TokenRecord& token : tokens) aggregator.Add(token);
  return aggregator.Finish();
}

EmbeddingSet AggregateTypeEmbeddings(std::istream& tokens,
                                     std::optional<std::size_t> dimension) {
  std::optional<TypeAggregator> aggregator;
  ForEachEntry(tokens, dimension,
               [&](std::string_view word, const std::vector<double>& row,
                   std::size_t) {
                 if (!aggregator) aggregator.emplace(row.size());
                 aggregator->Add(word, row);
               });
  return aggregator->Finish();
}

}  // namespace nliprobe
