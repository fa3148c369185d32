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

#include "nliprobe/templates.h"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "nliprobe/error.h"
#include "test_util.h"

namespace nliprobe {
namespace {

using testing::BundledLists;

TEST(RenderSentence, ArticleAndPeriod) {
  EXPECT_EQ(RenderSentence("banker", "spoke to", "crew"), "The banker spoke to a crew.");
  EXPECT_EQ(RenderSentence("accountant", "ate", "bagel"), "The accountant ate a bagel.");
  EXPECT_EQ(RenderSentence("evil person", "crashed", "apple"),
            "The evil person crashed an apple.");
}

TEST(IndefiniteArticle, RuleAndOverrides) {
  EXPECT_EQ(IndefiniteArticle("ox"), "an");
  EXPECT_EQ(IndefiniteArticle("urchin"), "an");
  EXPECT_EQ(IndefiniteArticle("SUV"), "an");
  EXPECT_EQ(IndefiniteArticle("TV"), "a");
  EXPECT_EQ(IndefiniteArticle("bagel"), "a");
}

TEST(Capitalize, FirstLetter) {
  EXPECT_EQ(Capitalize("french"), "French");
  EXPECT_EQ(Capitalize(""), "");
}

TEST(ParseProbe, Names) {
  EXPECT_EQ(ParseProbe("gender"), Probe::kGender);
  EXPECT_EQ(ProbeName(ParseProbe("religion")), "religion");
  try {
    ParseProbe("age");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUsage);
  }
}

TEST(CountPairs, NationalityAndReligion) {
  EXPECT_EQ(CountPairs(Probe::kNationality, BundledLists()), 2134080u);
  EXPECT_EQ(CountPairs(Probe::kReligion, BundledLists()), 1133730u);
}

TEST(CountPairs, GenderFormula) {
  const WordLists& l = BundledLists();
  EXPECT_EQ(CountPairs(Probe::kGender, l),
            l.occupations.size() * l.verbs.size() * l.AllObjects().size() * 6);
  GenerationOptions restricted;
  restricted.object_scope = ObjectScope::kRestricted;
  const std::uint64_t persons = l.rulers.size() + l.person_hyponyms.size();
  EXPECT_EQ(CountPairs(Probe::kGender, l, restricted),
            l.occupations.size() * 6 *
                (l.verbs.size() * l.objects_things.size() +
                 InteractionVerbs().size() * persons));
}

TEST(CountPairs, DedupeDropsRepeatedPolarity) {
  GenerationOptions dedupe;
  dedupe.dedupe = true;
  EXPECT_EQ(CountPairs(Probe::kReligion, BundledLists(), dedupe), 25u * 27 * 95 * 17);
}

TEST(PairGenerator, GenderBaseCase) {
  GenerationOptions o;
  o.premise_subjects = {"accountant"};
  o.verbs = {"ate"};
  o.objects = {"bagel"};
  PairGenerator gen(Probe::kGender, BundledLists(), o);
  ASSERT_EQ(gen.size(), 6u);
  std::set<std::string> hypotheses;
  TemplatePair p;
  while (gen.Next(p)) {
    EXPECT_EQ(p.premise, "The accountant ate a bagel.");
    hypotheses.insert(p.hypothesis);
  }
  EXPECT_EQ(hypotheses, (std::set<std::string>{
                            "The man ate a bagel.", "The woman ate a bagel.",
                            "The guy ate a bagel.", "The girl ate a bagel.",
                            "The gentleman ate a bagel.", "The lady ate a bagel."}));
}

TEST(PairGenerator, UnknownRestrictionIsUsageError) {
  GenerationOptions o;
  o.verbs = {"teleported"};
  try {
    PairGenerator(Probe::kGender, BundledLists(), o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUsage);
  }
}

TEST(PairGenerator, NationalitySurfaceForm) {
  const PairGenerator gen(Probe::kNationality, BundledLists());
  const TemplatePair p = gen.at(0);
  const WordLists& l = BundledLists();
  EXPECT_EQ(p.premise,
            RenderSentence(l.polarity[0] + " person", l.verbs[0], l.objects_things[0]));
  EXPECT_EQ(p.hypothesis, RenderSentence(Capitalize(l.demonyms_test[0]) + " person",
                                         l.verbs[0], l.objects_things[0]));
  EXPECT_EQ(p.id, "nationality/" + p.slots.subject_premise + "/" +
                      p.slots.subject_hypothesis + "/" + p.slots.verb + "/" +
                      p.slots.object);
}

TEST(PairGenerator, StreamLengthsAndUniqueIds) {
  for (Probe probe : {Probe::kNationality, Probe::kReligion}) {
    PairGenerator gen(probe, BundledLists());
    std::uint64_t n = 0;
    std::set<std::string> ids;
    TemplatePair p;
    while (gen.Next(p)) {
      if (n % 97 == 0) ids.insert(p.id);
      ++n;
    }
    EXPECT_EQ(n, CountPairs(probe, BundledLists()));
    EXPECT_EQ(ids.size(), (n + 96) / 97);
  }
}

TEST(PairGenerator, RepeatedFillerGetsMarker) {
  const PairGenerator gen(Probe::kReligion, BundledLists());
  std::set<std::string> premise_ids;
  for (std::uint64_t i = 0; i < gen.size(); i += gen.pairs_per_premise_subject()) {
    const TemplatePair p = gen.at(i);
    premise_ids.insert(p.id.substr(0, p.id.find('/', 9)));
  }
  EXPECT_EQ(premise_ids.size(), 26u);
  EXPECT_TRUE(premise_ids.count("religion/terrible#2"));
  EXPECT_TRUE(premise_ids.count("religion/terrible"));
}

TEST(PairGenerator, RandomAccessMatchesSequential) {
  GenerationOptions o;
  o.object_scope = ObjectScope::kRestricted;
  o.premise_subjects = {"nurse", "banker"};
  PairGenerator gen(Probe::kGender, BundledLists(), o);
  TemplatePair p;
  for (std::uint64_t i = 0; gen.Next(p); ++i) {
    const TemplatePair q = gen.at(i);
    ASSERT_EQ(p.id, q.id);
    ASSERT_EQ(p.premise, q.premise);
  }
  EXPECT_THROW(gen.at(gen.size()), Error);
}

TEST(PairGenerator, RestrictedScopeKeepsPersonsWithInteractionVerbs) {
  GenerationOptions o;
  o.object_scope = ObjectScope::kRestricted;
  o.premise_subjects = {"nurse"};
  o.hypothesis_subjects = {"man"};
  PairGenerator gen(Probe::kGender, BundledLists(), o);
  const std::set<std::string> interaction(InteractionVerbs().begin(),
                                          InteractionVerbs().end());
  const std::set<std::string> things(BundledLists().objects_things.begin(),
                                     BundledLists().objects_things.end());
  TemplatePair p;
  while (gen.Next(p)) {
    if (!things.count(p.slots.object)) EXPECT_TRUE(interaction.count(p.slots.verb));
  }
}

TEST(PairJson, RoundTrip) {
  const PairGenerator gen(Probe::kReligion, BundledLists());
  for (std::uint64_t i : {std::uint64_t{0}, std::uint64_t{12345}, gen.size() - 1}) {
    const TemplatePair p = gen.at(i);
    const TemplatePair q = PairFromJsonLine(PairToJsonLine(p));
    EXPECT_EQ(q.id, p.id);
    EXPECT_EQ(q.probe, p.probe);
    EXPECT_EQ(q.premise, p.premise);
    EXPECT_EQ(q.hypothesis, p.hypothesis);
    EXPECT_EQ(q.slots, p.slots);
  }
  EXPECT_THROW(PairFromJsonLine("{\"id\": 3}"), Error);
}

TEST(WritePairs, ReadBack) {
  const PairGenerator gen(Probe::kNationality, BundledLists());
  std::stringstream buffer;
  WritePairs(gen, 100, 150, buffer);
  const auto pairs = ReadPairs(buffer);
  ASSERT_EQ(pairs.size(), 50u);
  EXPECT_EQ(pairs.front().id, gen.at(100).id);
  std::istringstream bad("\n{\"id\":\"x\"}\n");
  try {
    ReadPairs(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

}  // namespace
}  // namespace nliprobe
