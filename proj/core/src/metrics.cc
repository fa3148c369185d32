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

#include "nliprobe/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "nliprobe/embedding_set.h"
#include "nliprobe/error.h"
#include "nliprobe/parallel.h"

namespace nliprobe {
namespace {

using Json = nlohmann::json;

constexpr double kFixedPointScale = 0x1.0p62;

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string StripRepeatMarker(std::string_view part) {
  const auto hash = part.rfind('#');
  if (hash != std::string_view::npos && hash + 1 < part.size() &&
      std::all_of(part.begin() + hash + 1, part.end(),
                  [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    part = part.substr(0, hash);
  }
  return std::string(part);
}

std::string TauLabel(double tau) {
  std::ostringstream os;
  os << tau;
  return "T:" + os.str();
}

std::string Fixed(double v, int decimals) { return FormatFixed(v, decimals); }

std::string_view TieRuleName(TieRule rule) {
  return rule == TieRule::kInclusive ? "inclusive" : "strict";
}

Json RowsToJson(const std::vector<ExtremeRow>& rows) {
  Json out = Json::array();
  for (const ExtremeRow& r : rows) {
    out.push_back({{"id", r.pair_id},
                   {"subject_premise", r.slots.subject_premise},
                   {"subject_hypothesis", r.slots.subject_hypothesis},
                   {"verb", r.slots.verb},
                   {"object", r.slots.object},
                   {"e", r.e},
                   {"c", r.c}});
  }
  return out;
}

// JSON numbers with a fixed number of decimals. nlohmann prints shortest
// round-trip forms, so the metric fields are patched in as raw text.
class FixedJsonWriter {
 public:
  void Raw(std::string_view key, const std::string& raw_value) {
    Separator();
    out_ += "  " + Json(std::string(key)).dump() + ": " + raw_value;
  }
  void Value(std::string_view key, const Json& value) {
    Raw(key, value.dump());
  }
  void Number(std::string_view key, double v) { Raw(key, Fixed(v, 6)); }
  std::string Finish() { return out_ + "\n}\n"; }

 private:
  void Separator() { out_ += first_ ? "{\n" : ",\n"; first_ = false; }
  std::string out_;
  bool first_ = true;
};

MetricOptions CanonicalMetricOptions(MetricOptions options) {
  std::sort(options.taus.begin(), options.taus.end());
  options.taus.erase(std::unique(options.taus.begin(), options.taus.end()),
                     options.taus.end());
  return options;
}

}  // namespace

std::string_view LabelName(Label label) {
  switch (label) {
    case Label::kEntail:
      return "entail";
    case Label::kNeutral:
      return "neutral";
    case Label::kContradict:
      return "contradict";
  }
  return "unknown";
}

Label ParseLabel(std::string_view name) {
  if (name == "entail" || name == "e") return Label::kEntail;
  if (name == "neutral" || name == "n") return Label::kNeutral;
  if (name == "contradict" || name == "c") return Label::kContradict;
  Fail(ErrorCode::kUsage, "unknown label '" + std::string(name) +
                              "' (expected entail, neutral or contradict)");
}

void ExactProbabilitySum::Add(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    Fail(ErrorCode::kValidation, "probability " + FormatRoundTrip(p) + " outside [0, 1]");
  }
  total_ += static_cast<std::uint64_t>(std::llround(p * kFixedPointScale));
}

double ExactProbabilitySum::Mean(std::uint64_t count) const {
  if (count == 0) Fail(ErrorCode::kEmptyInput, "mean of an empty stream");
  // Exact integer division first keeps the result independent of how the
  // total was accumulated.
  const unsigned __int128 whole = total_ / count;
  const unsigned __int128 rest = total_ % count;
  const double q = static_cast<double>(whole) +
                   static_cast<double>(rest) / static_cast<double>(count);
  return q / kFixedPointScale;
}

NeutralityAccumulator::NeutralityAccumulator(MetricOptions options)
    : options_(std::move(options)), above_tau_(options_.taus.size(), 0) {
  for (const double tau : options_.taus) {
    if (!(tau > 0.0 && tau < 1.0)) {
      Fail(ErrorCode::kValidation,
           "threshold tau = " + FormatRoundTrip(tau) + " outside (0, 1)");
    }
  }
}

void NeutralityAccumulator::Add(const PredictionTriple& t) {
  ++count_;
  neutral_sum_.Add(t.n);
  const bool neutral_max = options_.tie_rule == TieRule::kInclusive
                               ? (t.n >= t.e && t.n >= t.c)
                               : (t.n > t.e && t.n > t.c);
  if (neutral_max) ++neutral_argmax_;
  for (std::size_t i = 0; i < options_.taus.size(); ++i) {
    if (t.n > options_.taus[i]) ++above_tau_[i];
  }
}

void NeutralityAccumulator::Merge(const NeutralityAccumulator& other) {
  if (other.options_.taus != options_.taus ||
      other.options_.tie_rule != options_.tie_rule) {
    Fail(ErrorCode::kValidation, "cannot merge accumulators with different options");
  }
  count_ += other.count_;
  neutral_sum_.Merge(other.neutral_sum_);
  neutral_argmax_ += other.neutral_argmax_;
  for (std::size_t i = 0; i < above_tau_.size(); ++i) {
    above_tau_[i] += other.above_tau_[i];
  }
}

void NeutralityAccumulator::RequireNonEmpty() const {
  if (count_ == 0) Fail(ErrorCode::kEmptyInput, "no scored pairs");
}

double NeutralityAccumulator::NetNeutral() const {
  RequireNonEmpty();
  return neutral_sum_.Mean(count_);
}

double NeutralityAccumulator::FractionNeutral() const {
  RequireNonEmpty();
  return static_cast<double>(neutral_argmax_) / static_cast<double>(count_);
}

double NeutralityAccumulator::ThresholdNeutral(std::size_t tau_index) const {
  RequireNonEmpty();
  return static_cast<double>(above_tau_.at(tau_index)) /
         static_cast<double>(count_);
}

double NetNeutral(std::span<const ScoredPair> scored) {
  NeutralityAccumulator acc(MetricOptions{{}, TieRule::kInclusive});
  for (const ScoredPair& s : scored) acc.Add(s.triple);
  return acc.NetNeutral();
}

double FractionNeutral(std::span<const ScoredPair> scored, TieRule tie_rule) {
  NeutralityAccumulator acc(MetricOptions{{}, tie_rule});
  for (const ScoredPair& s : scored) acc.Add(s.triple);
  return acc.FractionNeutral();
}

double ThresholdNeutral(std::span<const ScoredPair> scored, double tau) {
  NeutralityAccumulator acc(MetricOptions{{tau}, TieRule::kInclusive});
  for (const ScoredPair& s : scored) acc.Add(s.triple);
  return acc.ThresholdNeutral(0);
}

PairIndex PairIndex::FromPairs(std::span<const TemplatePair> pairs) {
  PairIndex index;
  index.slots_.reserve(pairs.size());
  for (const TemplatePair& p : pairs) index.slots_.emplace(p.id, p.slots);
  return index;
}

Slots PairIndex::Lookup(const std::string& pair_id) const {
  if (slots_.empty()) return SlotsFromPairId(pair_id);
  const auto it = slots_.find(pair_id);
  if (it == slots_.end()) {
    Fail(ErrorCode::kLookup, "pair id '" + pair_id + "' not in the pairs index");
  }
  return it->second;
}

Slots SlotsFromPairId(std::string_view pair_id) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t slash = pair_id.find('/', start);
    parts.push_back(pair_id.substr(start, slash == std::string_view::npos
                                              ? std::string_view::npos
                                              : slash - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  if (parts.size() != 5) {
    Fail(ErrorCode::kParse, "pair id '" + std::string(pair_id) +
                                "' is not probe/premise/hypothesis/verb/object");
  }
  return Slots{StripRepeatMarker(parts[1]), StripRepeatMarker(parts[2]),
               StripRepeatMarker(parts[3]), StripRepeatMarker(parts[4])};
}

SlotFilter SlotFilter::Parse(std::string_view text) {
  SlotFilter filter;
  if (text.empty() || text == "all") return filter;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string_view term = text.substr(start, comma - start);
    start = comma + 1;
    while (!term.empty() && term.front() == ' ') term.remove_prefix(1);
    while (!term.empty() && term.back() == ' ') term.remove_suffix(1);
    const std::size_t eq = term.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == term.size()) {
      Fail(ErrorCode::kUsage, "group filter term '" + std::string(term) +
                                  "' is not key=value");
    }
    const std::string key = ToLower(term.substr(0, eq));
    Field field;
    if (key == "premise" || key == "subject_premise") {
      field = Field::kPremise;
    } else if (key == "hypothesis" || key == "subject_hypothesis") {
      field = Field::kHypothesis;
    } else if (key == "verb") {
      field = Field::kVerb;
    } else if (key == "object") {
      field = Field::kObject;
    } else {
      Fail(ErrorCode::kUsage, "unknown group filter key '" + key + "'");
    }
    filter.terms_.emplace_back(field, ToLower(term.substr(eq + 1)));
    if (comma == text.size()) break;
  }
  filter.description_ = std::string(text);
  return filter;
}

bool SlotFilter::Matches(const Slots& slots) const {
  for (const auto& [field, value] : terms_) {
    const std::string* slot = nullptr;
    switch (field) {
      case Field::kPremise:
        slot = &slots.subject_premise;
        break;
      case Field::kHypothesis:
        slot = &slots.subject_hypothesis;
        break;
      case Field::kVerb:
        slot = &slots.verb;
        break;
      case Field::kObject:
        slot = &slots.object;
        break;
    }
    if (ToLower(*slot) != value) return false;
  }
  return true;
}

GroupStat GroupMean(std::span<const ScoredPair> scored, const PairIndex& index,
                    const SlotFilter& filter, Label label) {
  ExactProbabilitySum sum;
  std::uint64_t count = 0;
  for (const ScoredPair& s : scored) {
    if (!filter.Matches(index.Lookup(s.pair_id))) continue;
    sum.Add(LabelValue(s.triple, label));
    ++count;
  }
  if (count == 0) {
    Fail(ErrorCode::kEmptyInput,
         "group filter '" + filter.description() + "' matches no pairs");
  }
  return GroupStat{filter.description(), label, sum.Mean(count), count};
}

TopK::TopK(std::size_t k, Label by) : k_(k), by_(by) {
  if (k_ == 0) Fail(ErrorCode::kUsage, "top-k needs k >= 1");
  if (by_ == Label::kNeutral) {
    Fail(ErrorCode::kUsage, "extremes are ranked by entail or contradict");
  }
}

bool TopK::Better(const ScoredPair& a, const ScoredPair& b) const {
  const double va = LabelValue(a.triple, by_);
  const double vb = LabelValue(b.triple, by_);
  if (va != vb) return va > vb;
  return a.pair_id < b.pair_id;
}

void TopK::Add(const ScoredPair& scored) {
  auto worse_on_top = [this](const ScoredPair& a, const ScoredPair& b) {
    return Better(a, b);
  };
  if (heap_.size() < k_) {
    heap_.push_back(scored);
    std::push_heap(heap_.begin(), heap_.end(), worse_on_top);
  } else if (Better(scored, heap_.front())) {
    std::pop_heap(heap_.begin(), heap_.end(), worse_on_top);
    heap_.back() = scored;
    std::push_heap(heap_.begin(), heap_.end(), worse_on_top);
  }
}

void TopK::Merge(const TopK& other) {
  for (const ScoredPair& s : other.heap_) Add(s);
}

std::vector<ScoredPair> TopK::Sorted() const {
  std::vector<ScoredPair> out = heap_;
  std::sort(out.begin(), out.end(),
            [this](const ScoredPair& a, const ScoredPair& b) { return Better(a, b); });
  return out;
}

std::vector<ExtremeRow> Extremes(std::span<const ScoredPair> scored,
                                 const PairIndex& index, std::size_t k,
                                 Label by) {
  TopK top(k, by);
  for (const ScoredPair& s : scored) top.Add(s);
  std::vector<ExtremeRow> rows;
  for (const ScoredPair& s : top.Sorted()) {
    rows.push_back(ExtremeRow{s.pair_id, index.Lookup(s.pair_id), s.triple.e,
                              s.triple.c});
  }
  return rows;
}

ReportBuilder::ReportBuilder(const EvaluateOptions& options,
                             const PairIndex& index)
    : options_(&options),
      index_(&index),
      neutrality_(CanonicalMetricOptions(options.metrics)),
      groups_(options.group_filters.size() * options.group_labels.size()) {
  if (options.top_k > 0) {
    entail_.emplace(options.top_k, Label::kEntail);
    contradict_.emplace(options.top_k, Label::kContradict);
  }
}

void ReportBuilder::Add(const ScoredPair& scored) {
  neutrality_.Add(scored.triple);
  if (!groups_.empty()) {
    const Slots slots = index_->Lookup(scored.pair_id);
    const auto& labels = options_->group_labels;
    for (std::size_t f = 0; f < options_->group_filters.size(); ++f) {
      if (!options_->group_filters[f].Matches(slots)) continue;
      for (std::size_t l = 0; l < labels.size(); ++l) {
        Group& g = groups_[f * labels.size() + l];
        g.sum.Add(LabelValue(scored.triple, labels[l]));
        ++g.count;
      }
    }
  }
  if (entail_) {
    entail_->Add(scored);
    contradict_->Add(scored);
  }
}

void ReportBuilder::Merge(const ReportBuilder& other) {
  neutrality_.Merge(other.neutrality_);
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    groups_[i].sum.Merge(other.groups_[i].sum);
    groups_[i].count += other.groups_[i].count;
  }
  if (entail_) {
    entail_->Merge(*other.entail_);
    contradict_->Merge(*other.contradict_);
  }
}

NeutralityReport ReportBuilder::Finish(std::string probe,
                                       std::string scorer_id) const {
  if (neutrality_.count() == 0) {
    Fail(ErrorCode::kEmptyInput, "no scored pairs to evaluate");
  }
  NeutralityReport report;
  report.probe = std::move(probe);
  report.scorer_id = std::move(scorer_id);
  report.count = neutrality_.count();
  report.nn = neutrality_.NetNeutral();
  report.fn = neutrality_.FractionNeutral();
  report.tie_rule = neutrality_.options().tie_rule;
  const auto& taus = neutrality_.options().taus;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    report.thresholds.emplace_back(taus[i], neutrality_.ThresholdNeutral(i));
  }
  const auto& labels = options_->group_labels;
  for (std::size_t f = 0; f < options_->group_filters.size(); ++f) {
    for (std::size_t l = 0; l < labels.size(); ++l) {
      const Group& g = groups_[f * labels.size() + l];
      if (g.count == 0) {
        Fail(ErrorCode::kEmptyInput, "group filter '" +
                                         options_->group_filters[f].description() +
                                         "' matches no pairs");
      }
      report.groups.push_back(GroupStat{options_->group_filters[f].description(),
                                        labels[l], g.sum.Mean(g.count), g.count});
    }
  }
  if (entail_) {
    for (const ScoredPair& s : entail_->Sorted()) {
      report.top_entail.push_back(
          ExtremeRow{s.pair_id, index_->Lookup(s.pair_id), s.triple.e, s.triple.c});
    }
    for (const ScoredPair& s : contradict_->Sorted()) {
      report.top_contradict.push_back(
          ExtremeRow{s.pair_id, index_->Lookup(s.pair_id), s.triple.e, s.triple.c});
    }
  }
  return report;
}

NeutralityReport Evaluate(std::span<const ScoredPair> scored,
                          const PairIndex& index, std::string probe,
                          std::string scorer_id, const EvaluateOptions& options) {
  if (scored.empty()) Fail(ErrorCode::kEmptyInput, "no scored pairs to evaluate");
  const unsigned workers = ResolveWorkers(options.workers);
  const std::size_t chunks =
      std::max<std::size_t>(1, std::min<std::size_t>(workers, scored.size()));
  std::vector<ReportBuilder> partial(chunks, ReportBuilder(options, index));
  ParallelChunks(scored.size(), workers,
                 [&](std::size_t c, std::size_t begin, std::size_t end) {
                   for (std::size_t i = begin; i < end; ++i) partial[c].Add(scored[i]);
                 });
  for (std::size_t c = 1; c < chunks; ++c) partial[0].Merge(partial[c]);
  return partial[0].Finish(std::move(probe), std::move(scorer_id));
}

NeutralityReport AverageReports(std::span<const NeutralityReport> reports) {
  if (reports.empty()) Fail(ErrorCode::kEmptyInput, "no reports to average");
  NeutralityReport out;
  out.probe = reports.front().probe;
  out.scorer_id = reports.front().scorer_id;
  out.count = reports.front().count;
  out.tie_rule = reports.front().tie_rule;
  CompensatedSum nn;
  CompensatedSum fn;
  std::vector<CompensatedSum> thresholds(reports.front().thresholds.size());
  for (const NeutralityReport& r : reports) {
    if (r.probe != out.probe || r.thresholds.size() != thresholds.size()) {
      Fail(ErrorCode::kValidation, "cannot average reports of different probes or tau sets");
    }
    nn.Add(r.nn);
    fn.Add(r.fn);
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      if (r.thresholds[i].first != reports.front().thresholds[i].first) {
        Fail(ErrorCode::kValidation, "cannot average reports with different tau sets");
      }
      thresholds[i].Add(r.thresholds[i].second);
    }
  }
  const double n = static_cast<double>(reports.size());
  out.nn = nn.value() / n;
  out.fn = fn.value() / n;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    out.thresholds.emplace_back(reports.front().thresholds[i].first,
                                thresholds[i].value() / n);
  }
  return out;
}

ReportDiff CompareReports(const NeutralityReport& before,
                          const NeutralityReport& after) {
  if (before.probe != after.probe) {
    Fail(ErrorCode::kValidation, "probe mismatch: '" + before.probe + "' vs '" +
                                     after.probe + "'");
  }
  if (before.thresholds.size() != after.thresholds.size()) {
    Fail(ErrorCode::kValidation, "tau sets differ");
  }
  ReportDiff diff;
  diff.probe = before.probe;
  auto add = [&](std::string name, double b, double a) {
    MetricDiff m{std::move(name), b, a, 0.0, 0.0};
    if (b == 0.0) {
      if (a != 0.0) {
        Fail(ErrorCode::kNumeric, "zero baseline for " + m.metric +
                                      "; percentage change undefined");
      }
    } else {
      m.percent = 100.0 * (a - b) / b;
      m.percent_rounded = std::round(m.percent * 10.0) / 10.0;
      if (m.percent_rounded == 0.0) m.percent_rounded = 0.0;  // no "-0.0"
    }
    diff.metrics.push_back(std::move(m));
  };
  add("NN", before.nn, after.nn);
  add("FN", before.fn, after.fn);
  for (std::size_t i = 0; i < before.thresholds.size(); ++i) {
    if (before.thresholds[i].first != after.thresholds[i].first) {
      Fail(ErrorCode::kValidation, "tau sets differ");
    }
    add(TauLabel(before.thresholds[i].first), before.thresholds[i].second,
        after.thresholds[i].second);
  }
  return diff;
}

std::string ReportToJson(const NeutralityReport& report) {
  FixedJsonWriter w;
  w.Value("format", "nliprobe.report/1");
  w.Value("probe", report.probe);
  w.Value("scorer", report.scorer_id);
  w.Value("count", report.count);
  w.Value("fn_tie_rule", std::string(TieRuleName(report.tie_rule)));
  w.Number("nn", report.nn);
  w.Number("fn", report.fn);
  std::string thresholds = "[";
  for (std::size_t i = 0; i < report.thresholds.size(); ++i) {
    if (i) thresholds += ", ";
    thresholds += "{\"tau\": " + FormatRoundTrip(report.thresholds[i].first) +
                  ", \"value\": " + Fixed(report.thresholds[i].second, 6) + "}";
  }
  thresholds += "]";
  w.Raw("thresholds", thresholds);
  std::string groups = "[";
  for (std::size_t i = 0; i < report.groups.size(); ++i) {
    const GroupStat& g = report.groups[i];
    if (i) groups += ", ";
    groups += "{\"filter\": " + Json(g.filter).dump() + ", \"label\": \"" +
              std::string(LabelName(g.label)) + "\", \"mean\": " +
              Fixed(g.mean, 6) + ", \"count\": " + std::to_string(g.count) + "}";
  }
  groups += "]";
  w.Raw("groups", groups);
  w.Value("top_entail", RowsToJson(report.top_entail));
  w.Value("top_contradict", RowsToJson(report.top_contradict));
  return w.Finish();
}

NeutralityReport ReportFromJson(std::string_view text) {
  try {
    const Json doc = Json::parse(text);
    if (doc.value("format", "") != "nliprobe.report/1") {
      Fail(ErrorCode::kParse, "report JSON: unsupported or missing format");
    }
    NeutralityReport r;
    r.probe = doc.at("probe").get<std::string>();
    r.scorer_id = doc.value("scorer", "");
    r.count = doc.at("count").get<std::uint64_t>();
    r.tie_rule = doc.value("fn_tie_rule", "inclusive") == "strict"
                     ? TieRule::kStrict
                     : TieRule::kInclusive;
    r.nn = doc.at("nn").get<double>();
    r.fn = doc.at("fn").get<double>();
    for (const Json& t : doc.at("thresholds")) {
      r.thresholds.emplace_back(t.at("tau").get<double>(), t.at("value").get<double>());
    }
    for (const Json& g : doc.value("groups", Json::array())) {
      r.groups.push_back(GroupStat{g.at("filter").get<std::string>(),
                                   ParseLabel(g.at("label").get<std::string>()),
                                   g.at("mean").get<double>(),
                                   g.at("count").get<std::uint64_t>()});
    }
    auto rows = [](const Json& array) {
      std::vector<ExtremeRow> out;
      for (const Json& x : array) {
        out.push_back(ExtremeRow{
            x.at("id").get<std::string>(),
            Slots{x.at("subject_premise").get<std::string>(),
                  x.at("subject_hypothesis").get<std::string>(),
                  x.at("verb").get<std::string>(), x.at("object").get<std::string>()},
            x.at("e").get<double>(), x.at("c").get<double>()});
      }
      return out;
    };
    r.top_entail = rows(doc.value("top_entail", Json::array()));
    r.top_contradict = rows(doc.value("top_contradict", Json::array()));
    return r;
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kParse, std::string("report JSON: ") + e.what());
  }
}

std::string ReportTable(
    std::span<const std::pair<std::string, NeutralityReport>> rows) {
  if (rows.empty()) return "";
  const NeutralityReport& head = rows.front().second;
  std::string out = "| | NN | FN |";
  std::string rule = "|---|---|---|";
  for (const auto& [tau, value] : head.thresholds) {
    out += " " + TauLabel(tau) + " |";
    rule += "---|";
  }
  out += "\n" + rule + "\n";
  for (const auto& [label, r] : rows) {
    out += "| " + label + " | " + Fixed(r.nn, 3) + " | " + Fixed(r.fn, 3) + " |";
    for (const auto& [tau, value] : r.thresholds) out += " " + Fixed(value, 3) + " |";
    out += "\n";
  }
  return out;
}

std::string FormatPercent(double rounded_percent) {
  return (rounded_percent >= 0 ? "+" : "") + Fixed(rounded_percent, 1) + "%";
}

std::string DiffToJson(const ReportDiff& diff) {
  FixedJsonWriter w;
  w.Value("format", "nliprobe.diff/1");
  w.Value("probe", diff.probe);
  std::string metrics = "[";
  for (std::size_t i = 0; i < diff.metrics.size(); ++i) {
    const MetricDiff& m = diff.metrics[i];
    if (i) metrics += ", ";
    metrics += "{\"metric\": " + Json(m.metric).dump() +
               ", \"before\": " + Fixed(m.before, 6) +
               ", \"after\": " + Fixed(m.after, 6) +
               ", \"percent\": " + Fixed(m.percent_rounded, 1) + "}";
  }
  metrics += "]";
  w.Raw("metrics", metrics);
  return w.Finish();
}

std::string DiffTable(const ReportDiff& diff, std::string_view after_label) {
  std::string out = "|";
  std::string rule = "|---|";
  out += " |";
  for (const MetricDiff& m : diff.metrics) {
    out += " " + m.metric + " |";
    rule += "---|";
  }
  out += "\n" + rule + "\n| before |";
  for (const MetricDiff& m : diff.metrics) out += " " + Fixed(m.before, 3) + " |";
  out += "\n| " + std::string(after_label) + " |";
  for (const MetricDiff& m : diff.metrics) out += " " + Fixed(m.after, 3) + " |";
  out += "\n| diff |";
  for (const MetricDiff& m : diff.metrics) out += " " + FormatPercent(m.percent_rounded) + " |";
  out += "\n";
  return out;
}

}  // namespace nliprobe
