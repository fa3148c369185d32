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

// Bundled word lists: sizes, duplicates and disjointness.

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "nliprobe/error.h"
#include "nliprobe/templates.h"
#include "test_util.h"

namespace nliprobe {
namespace {

using testing::BundledLists;

std::size_t Distinct(const std::vector<std::string>& list) {
  return std::set<std::string>(list.begin(), list.end()).size();
}

TEST(WordLists, Cardinalities) {
  const WordLists& l = BundledLists();
  EXPECT_EQ(l.verbs.size(), 27u);
  EXPECT_EQ(l.polarity.size(), 26u);
  EXPECT_EQ(l.demonyms_test.size(), 32u);
  EXPECT_EQ(l.adherents_test.size(), 17u);
  EXPECT_EQ(l.objects_things.size(), 95u);
  EXPECT_EQ(l.rulers.size(), 66u);
  EXPECT_EQ(l.person_hyponyms.size(), 23u);
  EXPECT_EQ(l.gendered_pairs.size(), 3u);
  EXPECT_EQ(l.demonyms_train.size(), 8u);
  EXPECT_EQ(l.adherents_train.size(), 8u);
  EXPECT_EQ(l.countries.size(), 39u);
  EXPECT_EQ(l.gendered_full.size(), 18u);
  EXPECT_EQ(l.AllObjects().size(), 184u);
}

// The printed occupation list holds 162 entries although the text around it
// speaks of 164. The shipped file follows the printed list.
TEST(WordLists, OccupationsAsPrinted) {
  EXPECT_EQ(BundledLists().occupations.size(), 162u);
  EXPECT_EQ(Distinct(BundledLists().occupations), 162u);
}

TEST(WordLists, OnlyPolarityRepeats) {
  const WordLists& l = BundledLists();
  EXPECT_EQ(Distinct(l.polarity), 25u);
  EXPECT_EQ(std::count(l.polarity.begin(), l.polarity.end(), "terrible"), 2);
  for (const auto* list : {&l.verbs, &l.demonyms_test, &l.adherents_test,
                           &l.objects_things, &l.rulers, &l.person_hyponyms,
                           &l.demonyms_train, &l.adherents_train, &l.countries}) {
    EXPECT_EQ(Distinct(*list), list->size());
  }
  EXPECT_EQ(Distinct(l.AllObjects()), 184u);
}

TEST(WordLists, TrainAndTestDisjoint) {
  const WordLists& l = BundledLists();
  for (const std::string& w : l.demonyms_train) {
    EXPECT_EQ(std::count(l.demonyms_test.begin(), l.demonyms_test.end(), w), 0) << w;
  }
  for (const std::string& w : l.adherents_train) {
    EXPECT_EQ(std::count(l.adherents_test.begin(), l.adherents_test.end(), w), 0) << w;
  }
}

TEST(WordLists, GenderedPairs) {
  EXPECT_EQ(BundledLists().GenderedWords(),
            (std::vector<std::string>{"man", "woman", "guy", "girl", "gentleman", "lady"}));
}

TEST(WordLists, InteractionVerbsAreVerbs) {
  const WordLists& l = BundledLists();
  for (const std::string& v : InteractionVerbs()) {
    EXPECT_EQ(std::count(l.verbs.begin(), l.verbs.end(), v), 1) << v;
  }
}

TEST(WordLists, MissingDirectory) {
  EXPECT_THROW(WordLists::LoadFromDirectory("/nonexistent/wordlists"), Error);
}

}  // namespace
}  // namespace nliprobe
