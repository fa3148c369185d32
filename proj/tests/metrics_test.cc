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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "nliprobe/error.h"
#include "test_util.h"

namespace nliprobe {
namespace {

std::vector<ScoredPair> Triples(const std::vector<PredictionTriple>& triples) {
  std::vector<ScoredPair> out;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    out.push_back({"gender/p" + std::to_string(i) + "/man/ate/apple", triples[i], "t"});
  }
  return out;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kUsage;
}

TEST(NetNeutral, Examples) {
  EXPECT_DOUBLE_EQ(NetNeutral(Triples({{0.2, 0.5, 0.3}, {0.4, 0.3, 0.3}})), 0.4);
  EXPECT_DOUBLE_EQ(NetNeutral(Triples({{0, 1, 0}, {0, 1, 0}})), 1.0);
  EXPECT_EQ(CodeOf([] { NetNeutral({}); }), ErrorCode::kEmptyInput);
}

TEST(NetNeutral, MatchesBruteForce) {
  const auto scored = testing::MockScored(testing::SamplePairs(1000), 1);
  long double sum = 0;
  for (const auto& s : scored) sum += s.triple.n;
  EXPECT_NEAR(NetNeutral(scored), static_cast<double>(sum / scored.size()), 1e-12);
}

TEST(FractionNeutral, Examples) {
  EXPECT_DOUBLE_EQ(FractionNeutral(Triples({{0.2, 0.5, 0.3}, {0.6, 0.3, 0.1}})), 0.5);
  const auto tie = Triples({{1.0 / 3, 1.0 / 3, 1.0 / 3}});
  EXPECT_DOUBLE_EQ(FractionNeutral(tie), 1.0);
  EXPECT_DOUBLE_EQ(FractionNeutral(tie, TieRule::kStrict), 0.0);
}

TEST(FractionNeutral, MatchesBruteForceCount) {
  const auto scored = testing::MockScored(testing::SamplePairs(1000), 2);
  std::size_t hits = 0;
  for (const auto& s : scored) {
    if (s.triple.n >= s.triple.e && s.triple.n >= s.triple.c) ++hits;
  }
  EXPECT_EQ(FractionNeutral(scored), static_cast<double>(hits) / 1000);
}

TEST(ThresholdNeutral, Strict) {
  EXPECT_DOUBLE_EQ(ThresholdNeutral(Triples({{0.31, 0.69, 0}, {0.29, 0.71, 0}}), 0.7), 0.5);
  EXPECT_DOUBLE_EQ(ThresholdNeutral(Triples({{0, 1, 0}}), 0.5), 1.0);
  EXPECT_DOUBLE_EQ(ThresholdNeutral(Triples({{0.25, 0.5, 0.25}}), 0.5), 0.0);
  EXPECT_EQ(CodeOf([] { ThresholdNeutral(Triples({{0, 1, 0}}), 1.0); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([] { ThresholdNeutral(Triples({{0, 1, 0}}), 0.0); }),
            ErrorCode::kValidation);
}

TEST(ExactProbabilitySum, OrderIndependentBits) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> values(5000);
  for (double& v : values) v = u(rng);
  ExactProbabilitySum a;
  for (double v : values) a.Add(v);
  std::shuffle(values.begin(), values.end(), rng);
  ExactProbabilitySum b;
  ExactProbabilitySum c;
  for (std::size_t i = 0; i < values.size(); ++i) (i % 2 ? b : c).Add(values[i]);
  b.Merge(c);
  EXPECT_EQ(a.Mean(values.size()), b.Mean(values.size()));
  EXPECT_THROW(a.Add(1.5), Error);
}

TEST(SlotsFromPairId, Decodes) {
  const Slots s = SlotsFromPairId("religion/terrible#2/jew/spoke to/crew");
  EXPECT_EQ(s.subject_premise, "terrible");
  EXPECT_EQ(s.subject_hypothesis, "jew");
  EXPECT_EQ(s.verb, "spoke to");
  EXPECT_EQ(s.object, "crew");
  EXPECT_EQ(CodeOf([] { SlotsFromPairId("a/b"); }), ErrorCode::kParse);
}

TEST(SlotFilter, ParseAndMatch) {
  const SlotFilter f = SlotFilter::Parse("premise=Rude, hypothesis=iraqi");
  Slots s{"rude", "Iraqi", "ate", "apple"};
  EXPECT_TRUE(f.Matches(s));
  s.verb = "owns";
  EXPECT_TRUE(f.Matches(s));
  s.subject_premise = "kind";
  EXPECT_FALSE(f.Matches(s));
  EXPECT_TRUE(SlotFilter::Parse("subject_hypothesis=iraqi").Matches({"x", "iraqi", "v", "o"}));
  EXPECT_THROW(SlotFilter::Parse("colour=red"), Error);
  EXPECT_THROW(SlotFilter::Parse("premise"), Error);
}

TEST(GroupMean, SingletonAndConsistency) {
  auto scored = Triples({{0.8, 0.1, 0.1}, {0.1, 0.5, 0.4}});
  scored[0].pair_id = "gender/banker/lady/ate/apple";
  const PairIndex index;
  EXPECT_DOUBLE_EQ(
      GroupMean(scored, index, SlotFilter::Parse("premise=banker"), Label::kEntail).mean,
      0.8);
  EXPECT_DOUBLE_EQ(GroupMean(scored, index, SlotFilter(), Label::kNeutral).mean,
                   NetNeutral(scored));
  EXPECT_EQ(CodeOf([&] {
              GroupMean(scored, index, SlotFilter::Parse("verb=flew"), Label::kEntail);
            }),
            ErrorCode::kEmptyInput);
}

TEST(GroupMean, DrillDownMatchesFilteredOracle) {
  const auto pairs = testing::SamplePairs(20000);
  const auto scored = testing::MockScored(pairs, 8);
  const PairIndex index = PairIndex::FromPairs(pairs);
  const SlotFilter f = SlotFilter::Parse("premise=rude,hypothesis=iraqi");
  long double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].slots.subject_premise == "rude" &&
        pairs[i].slots.subject_hypothesis == "iraqi") {
      sum += scored[i].triple.e;
      ++n;
    }
  }
  ASSERT_GT(n, 0u);
  const GroupStat g = GroupMean(scored, index, f, Label::kEntail);
  EXPECT_EQ(g.count, n);
  EXPECT_NEAR(g.mean, static_cast<double>(sum / n), 1e-12);
}

TEST(TopK, ClampAndTies) {
  auto scored = Triples({{0.5, 0.5, 0}, {0.5, 0.5, 0}, {0.9, 0.1, 0}});
  scored[0].pair_id = "gender/b/man/ate/apple";
  scored[1].pair_id = "gender/a/man/ate/apple";
  const auto rows = Extremes(scored, PairIndex(), 10, Label::kEntail);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].e, 0.9);
  EXPECT_EQ(rows[1].pair_id, "gender/a/man/ate/apple");
  EXPECT_EQ(rows[2].pair_id, "gender/b/man/ate/apple");
  EXPECT_THROW(Extremes(scored, PairIndex(), 0, Label::kEntail), Error);
  EXPECT_THROW(Extremes(scored, PairIndex(), 2, Label::kNeutral), Error);
}

TEST(TopK, MatchesFullSort) {
  const auto scored = testing::MockScored(testing::SamplePairs(1000), 6);
  for (Label by : {Label::kEntail, Label::kContradict}) {
    auto sorted = scored;
    std::sort(sorted.begin(), sorted.end(), [&](const ScoredPair& a, const ScoredPair& b) {
      const double va = LabelValue(a.triple, by);
      const double vb = LabelValue(b.triple, by);
      return va != vb ? va > vb : a.pair_id < b.pair_id;
    });
    const auto rows = Extremes(scored, PairIndex(), 3, by);
    ASSERT_EQ(rows.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(rows[i].pair_id, sorted[i].pair_id);
  }
}

TEST(Evaluate, InvariantUnderPermutationAndWorkers) {
  const auto pairs = testing::SamplePairs(5000);
  auto scored = testing::MockScored(pairs, 12);
  EvaluateOptions o;
  o.group_filters = {SlotFilter::Parse("premise=rude"), SlotFilter()};
  o.group_labels = {Label::kEntail, Label::kContradict};
  o.top_k = 5;
  const PairIndex index = PairIndex::FromPairs(pairs);
  const std::string reference = ReportToJson(Evaluate(scored, index, "nationality", "mock", o));
  std::mt19937_64 rng(1);
  for (unsigned workers : {1u, 3u, 8u}) {
    std::shuffle(scored.begin(), scored.end(), rng);
    o.workers = workers;
    EXPECT_EQ(ReportToJson(Evaluate(scored, index, "nationality", "mock", o)), reference);
  }
}

TEST(Report, JsonRoundTrip) {
  const auto scored = testing::MockScored(testing::SamplePairs(300), 2);
  EvaluateOptions o;
  o.metrics.taus = {0.7, 0.5, 0.5};
  o.group_filters = {SlotFilter::Parse("premise=rude")};
  o.top_k = 2;
  const NeutralityReport r = Evaluate(scored, PairIndex(), "nationality", "mock", o);
  ASSERT_EQ(r.thresholds.size(), 2u);
  EXPECT_EQ(r.thresholds[0].first, 0.5);
  const std::string json = ReportToJson(r);
  EXPECT_EQ(ReportToJson(ReportFromJson(json)), json);
  EXPECT_THROW(ReportFromJson("{}"), Error);
}

NeutralityReport Report(double nn, double fn, double t5, double t7) {
  NeutralityReport r;
  r.probe = "gender";
  r.count = 10;
  r.nn = nn;
  r.fn = fn;
  r.thresholds = {{0.5, t5}, {0.7, t7}};
  return r;
}

TEST(CompareReports, PercentChange) {
  const ReportDiff d = CompareReports(Report(0.387, 0.4, 0.2, 0.1), Report(0.480, 0.4, 0.3, 0.1));
  ASSERT_EQ(d.metrics.size(), 4u);
  EXPECT_EQ(d.metrics[0].metric, "NN");
  EXPECT_EQ(FormatPercent(d.metrics[0].percent_rounded), "+24.0%");
  EXPECT_EQ(FormatPercent(d.metrics[1].percent_rounded), "+0.0%");
  EXPECT_EQ(d.metrics[2].metric, "T:0.5");
  EXPECT_EQ(FormatPercent(d.metrics[2].percent_rounded), "+50.0%");
  EXPECT_EQ(FormatPercent(-6.0), "-6.0%");
}

TEST(CompareReports, IdenticalAndZeroBaseline) {
  const NeutralityReport r = Report(0.3, 0.0, 0.0, 0.0);
  for (const MetricDiff& m : CompareReports(r, r).metrics) {
    EXPECT_EQ(FormatPercent(m.percent_rounded), "+0.0%");
  }
  EXPECT_EQ(CodeOf([] { CompareReports(Report(0, 0, 0, 0), Report(0.1, 0, 0, 0)); }),
            ErrorCode::kNumeric);
  NeutralityReport other = r;
  other.probe = "religion";
  EXPECT_EQ(CodeOf([&] { CompareReports(r, other); }), ErrorCode::kValidation);
  other = r;
  other.thresholds.pop_back();
  EXPECT_EQ(CodeOf([&] { CompareReports(r, other); }), ErrorCode::kValidation);
}

TEST(AverageReports, MeansPerMetric) {
  const std::vector<NeutralityReport> reports = {Report(0.2, 0.4, 0.1, 0.0),
                                                 Report(0.4, 0.2, 0.3, 0.1)};
  const NeutralityReport avg = AverageReports(reports);
  EXPECT_DOUBLE_EQ(avg.nn, 0.3);
  EXPECT_DOUBLE_EQ(avg.fn, 0.3);
  EXPECT_DOUBLE_EQ(avg.thresholds[0].second, 0.2);
  EXPECT_DOUBLE_EQ(avg.thresholds[1].second, 0.05);
}

TEST(Tables, Markdown) {
  const std::vector<std::pair<std::string, NeutralityReport>> rows = {
      {"glove", Report(0.387, 0.394, 0.324, 0.114)}};
  EXPECT_EQ(ReportTable(rows),
            "| | NN | FN | T:0.5 | T:0.7 |\n|---|---|---|---|---|\n"
            "| glove | 0.387 | 0.394 | 0.324 | 0.114 |\n");
  const std::string diff =
      DiffTable(CompareReports(Report(0.387, 0.4, 0.2, 0.1), Report(0.480, 0.4, 0.3, 0.1)),
                "proj");
  EXPECT_NE(diff.find("| proj | 0.480 |"), std::string::npos) << diff;
  EXPECT_NE(diff.find("| diff | +24.0% |"), std::string::npos) << diff;
}

}  // namespace
}  // namespace nliprobe
