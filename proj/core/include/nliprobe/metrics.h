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

#ifndef NLIPROBE_METRICS_H_
#define NLIPROBE_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nliprobe/scoring.h"
#include "nliprobe/templates.h"

namespace nliprobe {

enum class Label { kEntail, kNeutral, kContradict };
std::string_view LabelName(Label label);
Label ParseLabel(std::string_view name);

inline double LabelValue(const PredictionTriple& t, Label label) {
  switch (label) {
    case Label::kEntail:
      return t.e;
    case Label::kNeutral:
      return t.n;
    case Label::kContradict:
      return t.c;
  }
  return 0.0;
}

// How Fraction Neutral treats n tied with the maximum.
enum class TieRule {
  kInclusive,  // 1[n = max(e, n, c)]: ties count as neutral
  kStrict,     // n strictly greater than both e and c
};

// Order-independent sum of probabilities in [0, 1]. Each value is rounded to
// a multiple of 2^-62 and summed as an integer, so any grouping or ordering
// of the same values yields the same bits.
class ExactProbabilitySum {
 public:
  void Add(double p);
  void Merge(const ExactProbabilitySum& other) { total_ += other.total_; }
  double Mean(std::uint64_t count) const;

 private:
  unsigned __int128 total_ = 0;
};

struct MetricOptions {
  std::vector<double> taus = {0.5, 0.7};
  TieRule tie_rule = TieRule::kInclusive;
};

// Mergeable single-pass reduction behind Net Neutral, Fraction Neutral and
// Threshold:tau.
class NeutralityAccumulator {
 public:
  // Throws kValidation when a tau is outside (0, 1).
  explicit NeutralityAccumulator(MetricOptions options = {});

  void Add(const PredictionTriple& t);
  void Merge(const NeutralityAccumulator& other);

  std::uint64_t count() const { return count_; }
  const MetricOptions& options() const { return options_; }

  // All throw kEmptyInput when count() == 0.
  double NetNeutral() const;
  double FractionNeutral() const;
  double ThresholdNeutral(std::size_t tau_index) const;

 private:
  void RequireNonEmpty() const;

  MetricOptions options_;
  std::uint64_t count_ = 0;
  ExactProbabilitySum neutral_sum_;
  std::uint64_t neutral_argmax_ = 0;
  std::vector<std::uint64_t> above_tau_;
};

// Convenience forms over a materialised stream.
double NetNeutral(std::span<const ScoredPair> scored);
double FractionNeutral(std::span<const ScoredPair> scored,
                       TieRule tie_rule = TieRule::kInclusive);
double ThresholdNeutral(std::span<const ScoredPair> scored, double tau);

// Maps pair ids to their slots. Built from a pairs file, or (when empty)
// falls back to decoding the id itself.
class PairIndex {
 public:
  PairIndex() = default;
  static PairIndex FromPairs(std::span<const TemplatePair> pairs);

  Slots Lookup(const std::string& pair_id) const;
  bool empty() const { return slots_.empty(); }

 private:
  std::unordered_map<std::string, Slots> slots_;
};

// Inverts the generator's id scheme; "#k" repeat markers are dropped.
// Throws kParse for ids not of the form probe/p/h/verb/object.
Slots SlotsFromPairId(std::string_view pair_id);

// Conjunction of slot equalities, e.g. "premise=rude,hypothesis=iraqi".
// Keys: premise | hypothesis | verb | object (or the subject_* slot names).
// Values compare case-insensitively.
class SlotFilter {
 public:
  SlotFilter() = default;
  static SlotFilter Parse(std::string_view text);

  bool Matches(const Slots& slots) const;
  const std::string& description() const { return description_; }

 private:
  enum class Field { kPremise, kHypothesis, kVerb, kObject };
  std::vector<std::pair<Field, std::string>> terms_;
  std::string description_ = "all";
};

struct GroupStat {
  std::string filter;
  Label label = Label::kEntail;
  double mean = 0.0;  // 0-1 scale
  std::uint64_t count = 0;
};

// Mean of `label` over pairs matching `filter`. Throws kEmptyInput when
// nothing matches.
GroupStat GroupMean(std::span<const ScoredPair> scored, const PairIndex& index,
                    const SlotFilter& filter, Label label);

struct ExtremeRow {
  std::string pair_id;
  Slots slots;
  double e = 0.0;
  double c = 0.0;
};

// Keeps the k best (value descending, pair id ascending) of a stream.
// Mergeable, so partitions can be reduced independently.
class TopK {
 public:
  TopK(std::size_t k, Label by);
  void Add(const ScoredPair& scored);
  void Merge(const TopK& other);
  // Best first.
  std::vector<ScoredPair> Sorted() const;

 private:
  bool Better(const ScoredPair& a, const ScoredPair& b) const;

  std::size_t k_;
  Label by_;
  std::vector<ScoredPair> heap_;  // worst on top
};

// Top-k rows by entail or contradict probability. Throws kUsage when k == 0
// or `by` is neutral.
std::vector<ExtremeRow> Extremes(std::span<const ScoredPair> scored,
                                 const PairIndex& index, std::size_t k,
                                 Label by);

struct NeutralityReport {
  std::string probe;  // probe name, or "" when unknown
  std::string scorer_id;
  std::uint64_t count = 0;
  double nn = 0.0;
  double fn = 0.0;
  std::vector<std::pair<double, double>> thresholds;  // (tau, value), tau ascending
  TieRule tie_rule = TieRule::kInclusive;
  std::vector<GroupStat> groups;
  std::vector<ExtremeRow> top_entail;
  std::vector<ExtremeRow> top_contradict;
};

struct EvaluateOptions {
  MetricOptions metrics;
  std::vector<SlotFilter> group_filters;
  std::vector<Label> group_labels = {Label::kEntail};
  std::size_t top_k = 0;  // 0 = no extremes tables
  unsigned workers = 1;   // 0 = hardware concurrency; result independent of it
};

// Streaming, mergeable form of Evaluate. Per-partition builders can be fed
// independently and merged in any order with identical results.
class ReportBuilder {
 public:
  ReportBuilder(const EvaluateOptions& options, const PairIndex& index);

  void Add(const ScoredPair& scored);
  void Merge(const ReportBuilder& other);
  std::uint64_t count() const { return neutrality_.count(); }

  // Throws kEmptyInput when nothing was added.
  NeutralityReport Finish(std::string probe, std::string scorer_id) const;

 private:
  struct Group {
    ExactProbabilitySum sum;
    std::uint64_t count = 0;
  };
  const EvaluateOptions* options_;
  const PairIndex* index_;
  NeutralityAccumulator neutrality_;
  std::vector<Group> groups_;  // filter-major, label-minor
  std::optional<TopK> entail_;
  std::optional<TopK> contradict_;
};

// Full reduction over a scored stream. Throws kEmptyInput for no pairs.
NeutralityReport Evaluate(std::span<const ScoredPair> scored,
                          const PairIndex& index, std::string probe,
                          std::string scorer_id, const EvaluateOptions& options);

// Arithmetic mean of the metric fields of several reports over the same
// probe and tau set (random-direction controls).
NeutralityReport AverageReports(std::span<const NeutralityReport> reports);

struct MetricDiff {
  std::string metric;  // "NN", "FN", "T:0.5", ...
  double before = 0.0;
  double after = 0.0;
  double percent = 0.0;          // 100 (after - before) / before
  double percent_rounded = 0.0;  // one decimal
};

struct ReportDiff {
  std::string probe;
  std::vector<MetricDiff> metrics;
};

// Percentage change per metric. A metric that is zero before and after
// counts as +0.0%. Throws kValidation for probe or tau-set mismatch and
// kNumeric for a zero baseline with a nonzero result.
ReportDiff CompareReports(const NeutralityReport& before,
                          const NeutralityReport& after);

// JSON with metrics at 6 decimals; stable field order.
std::string ReportToJson(const NeutralityReport& report);
NeutralityReport ReportFromJson(std::string_view text);

// Markdown table: NN, FN and one T:tau column per threshold, 3 decimals.
std::string ReportTable(std::span<const std::pair<std::string, NeutralityReport>> rows);
std::string DiffToJson(const ReportDiff& diff);
// Rows "before", "after" and "diff" in the same column layout.
std::string DiffTable(const ReportDiff& diff, std::string_view after_label);

// "+24.0%" / "-6.0%"
std::string FormatPercent(double rounded_percent);

}  // namespace nliprobe

#endif  // NLIPROBE_METRICS_H_
