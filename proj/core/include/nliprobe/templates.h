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

#ifndef NLIPROBE_TEMPLATES_H_
#define NLIPROBE_TEMPLATES_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nliprobe {

enum class Probe { kGender, kNationality, kReligion };

std::string_view ProbeName(Probe probe);
// Throws kUsage for anything but gender | nationality | religion.
Probe ParseProbe(std::string_view name);

// Bundled word lists, one entry per line under <data>/wordlists/.
struct WordLists {
  std::vector<std::string> occupations;
  std::vector<std::string> verbs;
  std::vector<std::string> objects_things;
  std::vector<std::string> rulers;
  std::vector<std::string> person_hyponyms;
  std::vector<std::pair<std::string, std::string>> gendered_pairs;
  std::vector<std::string> polarity;
  std::vector<std::string> demonyms_test;
  std::vector<std::string> demonyms_train;
  std::vector<std::string> adherents_test;
  std::vector<std::string> adherents_train;
  std::vector<std::string> countries;
  std::vector<std::string> gendered_full;

  // Reads every list from `directory` (the wordlists/ folder itself).
  // Throws kIo for a missing file and kParse for malformed pair lines.
  static WordLists LoadFromDirectory(const std::string& directory);

  // man, woman, guy, girl, gentleman, lady: pairs flattened in order.
  std::vector<std::string> GenderedWords() const;

  // things ++ rulers ++ person hyponyms.
  std::vector<std::string> AllObjects() const;
};

// Resolution order: $NLIPROBE_DATA_DIR, then the build-time default.
std::string DefaultDataDirectory();
std::string WordListDirectory(const std::string& data_directory);

// Verbs that take person-type objects under the restricted object scope.
const std::vector<std::string>& InteractionVerbs();

// "a" or "an" for the following word.
std::string_view IndefiniteArticle(std::string_view word);

// "The {subject_phrase} {verb} {a|an} {object}."
std::string RenderSentence(std::string_view subject_phrase,
                           std::string_view verb, std::string_view object);

// Uppercases the first ASCII letter ("french" -> "French").
std::string Capitalize(std::string_view word);

struct Slots {
  std::string subject_premise;
  std::string subject_hypothesis;
  std::string verb;
  std::string object;

  friend bool operator==(const Slots&, const Slots&) = default;
};

// One premise/hypothesis pair. The gold label is always neutral.
struct TemplatePair {
  std::string id;
  Probe probe = Probe::kGender;
  std::string premise;
  std::string hypothesis;
  Slots slots;
};

enum class ObjectScope {
  // Every verb with things, rulers and person hyponyms.
  kAll,
  // Person-type objects (rulers, hyponyms) only with InteractionVerbs().
  kRestricted,
};

struct GenerationOptions {
  ObjectScope object_scope = ObjectScope::kAll;
  // Drops repeated list entries (changes the polarity count from 26 to 25).
  bool dedupe = false;
  // Optional restrictions. Empty means the whole list; otherwise every entry
  // must occur in the corresponding list and list order is kept.
  std::vector<std::string> premise_subjects;
  std::vector<std::string> hypothesis_subjects;
  std::vector<std::string> verbs;
  std::vector<std::string> objects;
};

// Enumerates pairs in premise-subject, verb, object, hypothesis-subject
// order. Every index in [0, size()) maps to exactly one pair, so the stream
// can be partitioned freely and generated lazily.
//
// Pair ids are "<probe>/<premise filler>/<hypothesis filler>/<verb>/<object>".
// A filler that repeats inside its list gets "#k" appended for its k-th
// occurrence (k >= 2) so ids stay unique.
class PairGenerator {
 public:
  PairGenerator(Probe probe, const WordLists& lists,
                const GenerationOptions& options = {});

  Probe probe() const { return probe_; }
  std::uint64_t size() const { return size_; }

  // Number of pairs sharing one premise subject.
  std::uint64_t pairs_per_premise_subject() const {
    return combos_.size() * hypothesis_.size();
  }

  TemplatePair at(std::uint64_t index) const;

  // Sequential access. Returns false once exhausted.
  bool Next(TemplatePair& pair);
  void Reset() { cursor_ = 0; }

 private:
  struct Filler {
    std::string word;     // list entry as stored
    std::string id_part;  // word, or word#k for repeats
    std::string phrase;   // surface form used in sentences
  };
  static std::vector<Filler> MakeFillers(const std::vector<std::string>& list,
                                         std::string_view phrase_suffix,
                                         bool capitalize);

  Probe probe_;
  std::vector<Filler> premise_;
  std::vector<Filler> hypothesis_;
  std::vector<Filler> verbs_;
  std::vector<Filler> objects_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> combos_;  // verb, object
  std::uint64_t size_ = 0;
  std::uint64_t cursor_ = 0;
};

// Exact number of pairs PairGenerator would produce, by arithmetic over list
// sizes only.
std::uint64_t CountPairs(Probe probe, const WordLists& lists,
                         const GenerationOptions& options = {});

// One JSON object per line:
// {"id":..,"probe":..,"premise":..,"hypothesis":..,"slots":{...}}
std::string PairToJsonLine(const TemplatePair& pair);
TemplatePair PairFromJsonLine(std::string_view line);

// Streams every pair in [begin, end) to `out`.
void WritePairs(const PairGenerator& generator, std::uint64_t begin,
                std::uint64_t end, std::ostream& out);

// Reads a pairs file. Blank lines are skipped; malformed lines throw kParse
// naming the line number.
std::vector<TemplatePair> ReadPairs(std::istream& in);

}  // namespace nliprobe

#endif  // NLIPROBE_TEMPLATES_H_
