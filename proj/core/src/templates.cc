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

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "nliprobe/error.h"

#ifndef NLIPROBE_DEFAULT_DATA_DIR
#define NLIPROBE_DEFAULT_DATA_DIR "data"
#endif

namespace nliprobe {
namespace {

std::vector<std::string> ReadList(const std::string& directory,
                                  const std::string& name) {
  const std::string path = directory + "/" + name + ".txt";
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open word list '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

bool IsPersonObject(const WordLists& lists, const std::string& object) {
  return std::find(lists.rulers.begin(), lists.rulers.end(), object) !=
             lists.rulers.end() ||
         std::find(lists.person_hyponyms.begin(), lists.person_hyponyms.end(),
                   object) != lists.person_hyponyms.end();
}

bool IsInteractionVerb(const std::string& verb) {
  const auto& verbs = InteractionVerbs();
  return std::find(verbs.begin(), verbs.end(), verb) != verbs.end();
}

// Applies dedupe and an optional restriction to a list, keeping list order.
std::vector<std::string> SelectEntries(const std::vector<std::string>& list,
                                       const std::vector<std::string>& only,
                                       bool dedupe, std::string_view what) {
  std::unordered_set<std::string> wanted(only.begin(), only.end());
  for (const std::string& w : only) {
    if (std::find(list.begin(), list.end(), w) == list.end()) {
      Fail(ErrorCode::kUsage,
           "'" + w + "' is not in the " + std::string(what) + " list");
    }
  }
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const std::string& w : list) {
    if (!wanted.empty() && !wanted.contains(w)) continue;
    if (dedupe && !seen.insert(w).second) continue;
    out.push_back(w);
  }
  return out;
}

struct ProbeLists {
  std::vector<std::string> premise;
  std::vector<std::string> hypothesis;
  std::vector<std::string> verbs;
  std::vector<std::string> objects;
};

ProbeLists SelectProbeLists(Probe probe, const WordLists& lists,
                            const GenerationOptions& options) {
  ProbeLists out;
  switch (probe) {
    case Probe::kGender:
      out.premise = SelectEntries(lists.occupations, options.premise_subjects,
                                  options.dedupe, "occupations");
      out.hypothesis =
          SelectEntries(lists.GenderedWords(), options.hypothesis_subjects,
                        options.dedupe, "gendered words");
      out.objects = SelectEntries(lists.AllObjects(), options.objects,
                                  options.dedupe, "objects");
      break;
    case Probe::kNationality:
    case Probe::kReligion:
      out.premise = SelectEntries(lists.polarity, options.premise_subjects,
                                  options.dedupe, "polarity");
      out.hypothesis = SelectEntries(
          probe == Probe::kNationality ? lists.demonyms_test
                                       : lists.adherents_test,
          options.hypothesis_subjects, options.dedupe,
          probe == Probe::kNationality ? "demonyms" : "adherents");
      out.objects = SelectEntries(lists.objects_things, options.objects,
                                  options.dedupe, "objects");
      break;
  }
  out.verbs =
      SelectEntries(lists.verbs, options.verbs, options.dedupe, "verbs");
  return out;
}

void AppendJsonString(std::string& out, std::string_view s) {
  out += '"';
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        if (c < 0x20) {
          static const char* kHex = "0123456789abcdef";
          out += "\\u00";
          out += kHex[c >> 4];
          out += kHex[c & 0xf];
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

}  // namespace

std::string_view ProbeName(Probe probe) {
  switch (probe) {
    case Probe::kGender:
      return "gender";
    case Probe::kNationality:
      return "nationality";
    case Probe::kReligion:
      return "religion";
  }
  return "unknown";
}

Probe ParseProbe(std::string_view name) {
  if (name == "gender") return Probe::kGender;
  if (name == "nationality") return Probe::kNationality;
  if (name == "religion") return Probe::kReligion;
  Fail(ErrorCode::kUsage, "invalid probe kind '" + std::string(name) +
                              "' (expected gender, nationality or religion)");
}

WordLists WordLists::LoadFromDirectory(const std::string& directory) {
  WordLists lists;
  lists.occupations = ReadList(directory, "occupations");
  lists.verbs = ReadList(directory, "verbs");
  lists.objects_things = ReadList(directory, "objects_things");
  lists.rulers = ReadList(directory, "rulers");
  lists.person_hyponyms = ReadList(directory, "person_hyponyms");
  lists.polarity = ReadList(directory, "polarity");
  lists.demonyms_test = ReadList(directory, "demonyms_test");
  lists.demonyms_train = ReadList(directory, "demonyms_train");
  lists.adherents_test = ReadList(directory, "adherents_test");
  lists.adherents_train = ReadList(directory, "adherents_train");
  lists.countries = ReadList(directory, "countries");
  lists.gendered_full = ReadList(directory, "gendered_full");
  for (const std::string& line : ReadList(directory, "gendered_pairs")) {
    const auto space = line.find(' ');
    if (space == std::string::npos || line.find(' ', space + 1) != std::string::npos) {
      Fail(ErrorCode::kParse, "gendered_pairs: expected 'male female', got '" +
                                  line + "'");
    }
    lists.gendered_pairs.emplace_back(line.substr(0, space),
                                      line.substr(space + 1));
  }
  return lists;
}

std::vector<std::string> WordLists::GenderedWords() const {
  std::vector<std::string> out;
  for (const auto& [a, b] : gendered_pairs) {
    out.push_back(a);
    out.push_back(b);
  }
  return out;
}

std::vector<std::string> WordLists::AllObjects() const {
  std::vector<std::string> out = objects_things;
  out.insert(out.end(), rulers.begin(), rulers.end());
  out.insert(out.end(), person_hyponyms.begin(), person_hyponyms.end());
  return out;
}

std::string DefaultDataDirectory() {
  if (const char* env = std::getenv("NLIPROBE_DATA_DIR"); env && *env) {
    return env;
  }
  return NLIPROBE_DEFAULT_DATA_DIR;
}

std::string WordListDirectory(const std::string& data_directory) {
  return data_directory + "/wordlists";
}

const std::vector<std::string>& InteractionVerbs() {
  static const std::vector<std::string> kVerbs = {
      "befriended", "called", "hated", "identified", "interrupted",
      "liked",      "loved",  "met",   "spoke to",   "visited"};
  return kVerbs;
}

std::string_view IndefiniteArticle(std::string_view word) {
  // Pronunciation exceptions to the first-letter rule.
  static const std::unordered_map<std::string_view, std::string_view>
      kOverrides = {
          {"SUV", "an"},      {"hour", "an"},     {"honor", "an"},
          {"heir", "an"},     {"MBA", "an"},      {"uniform", "a"},
          {"unicorn", "a"},   {"university", "a"}, {"user", "a"},
          {"utensil", "a"},   {"one", "a"},       {"european", "a"},
      };
  if (const auto it = kOverrides.find(word); it != kOverrides.end()) {
    return it->second;
  }
  if (word.empty()) return "a";
  switch (std::tolower(static_cast<unsigned char>(word.front()))) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return "an";
    default:
      return "a";
  }
}

std::string RenderSentence(std::string_view subject_phrase,
                           std::string_view verb, std::string_view object) {
  std::string out;
  out.reserve(8 + subject_phrase.size() + verb.size() + object.size());
  out += "The ";
  out += subject_phrase;
  out += ' ';
  out += verb;
  out += ' ';
  out += IndefiniteArticle(object);
  out += ' ';
  out += object;
  out += '.';
  return out;
}

std::string Capitalize(std::string_view word) {
  std::string out(word);
  for (char& c : out) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    }
  }
  return out;
}

std::vector<PairGenerator::Filler> PairGenerator::MakeFillers(
    const std::vector<std::string>& list, std::string_view phrase_suffix,
    bool capitalize) {
  std::vector<Filler> out;
  out.reserve(list.size());
  std::map<std::string, int> occurrences;
  for (const std::string& w : list) {
    const int k = ++occurrences[w];
    Filler f;
    f.word = w;
    f.id_part = k == 1 ? w : w + "#" + std::to_string(k);
    f.phrase = (capitalize ? Capitalize(w) : w) + std::string(phrase_suffix);
    out.push_back(std::move(f));
  }
  return out;
}

PairGenerator::PairGenerator(Probe probe, const WordLists& lists,
                             const GenerationOptions& options)
    : probe_(probe) {
  const ProbeLists selected = SelectProbeLists(probe, lists, options);
  const bool people = probe != Probe::kGender;
  premise_ = MakeFillers(selected.premise, people ? " person" : "", false);
  hypothesis_ = MakeFillers(selected.hypothesis, people ? " person" : "", people);
  verbs_ = MakeFillers(selected.verbs, "", false);
  objects_ = MakeFillers(selected.objects, "", false);

  const bool restricted =
      probe == Probe::kGender && options.object_scope == ObjectScope::kRestricted;
  for (std::uint32_t v = 0; v < verbs_.size(); ++v) {
    const bool interaction = IsInteractionVerb(verbs_[v].word);
    for (std::uint32_t o = 0; o < objects_.size(); ++o) {
      if (restricted && !interaction && IsPersonObject(lists, objects_[o].word)) {
        continue;
      }
      combos_.emplace_back(v, o);
    }
  }
  size_ = static_cast<std::uint64_t>(premise_.size()) * combos_.size() *
          hypothesis_.size();
}

TemplatePair PairGenerator::at(std::uint64_t index) const {
  if (index >= size_) Fail(ErrorCode::kUsage, "pair index out of range");
  const std::uint64_t h = index % hypothesis_.size();
  index /= hypothesis_.size();
  const std::uint64_t combo = index % combos_.size();
  const std::uint64_t p = index / combos_.size();
  const Filler& prem = premise_[p];
  const Filler& hyp = hypothesis_[h];
  const Filler& verb = verbs_[combos_[combo].first];
  const Filler& object = objects_[combos_[combo].second];

  TemplatePair pair;
  pair.probe = probe_;
  pair.id.reserve(64);
  pair.id += ProbeName(probe_);
  for (const std::string* part :
       {&prem.id_part, &hyp.id_part, &verb.id_part, &object.id_part}) {
    pair.id += '/';
    pair.id += *part;
  }
  pair.premise = RenderSentence(prem.phrase, verb.phrase, object.phrase);
  pair.hypothesis = RenderSentence(hyp.phrase, verb.phrase, object.phrase);
  pair.slots = Slots{prem.word, hyp.word, verb.word, object.word};
  return pair;
}

bool PairGenerator::Next(TemplatePair& pair) {
  if (cursor_ >= size_) return false;
  pair = at(cursor_++);
  return true;
}

std::uint64_t CountPairs(Probe probe, const WordLists& lists,
                         const GenerationOptions& options) {
  const ProbeLists selected = SelectProbeLists(probe, lists, options);
  const std::uint64_t premise = selected.premise.size();
  const std::uint64_t hypothesis = selected.hypothesis.size();
  const std::uint64_t verbs = selected.verbs.size();
  const std::uint64_t objects = selected.objects.size();
  if (probe != Probe::kGender ||
      options.object_scope == ObjectScope::kAll) {
    return premise * verbs * objects * hypothesis;
  }
  const std::uint64_t interaction = std::count_if(
      selected.verbs.begin(), selected.verbs.end(), IsInteractionVerb);
  const std::uint64_t persons =
      std::count_if(selected.objects.begin(), selected.objects.end(),
                    [&](const std::string& o) { return IsPersonObject(lists, o); });
  const std::uint64_t things = objects - persons;
  return premise * hypothesis * (verbs * things + interaction * persons);
}

std::string PairToJsonLine(const TemplatePair& pair) {
  std::string out;
  out.reserve(256);
  out += "{\"id\":";
  AppendJsonString(out, pair.id);
  out += ",\"probe\":";
  AppendJsonString(out, ProbeName(pair.probe));
  out += ",\"premise\":";
  AppendJsonString(out, pair.premise);
  out += ",\"hypothesis\":";
  AppendJsonString(out, pair.hypothesis);
  out += ",\"slots\":{\"subject_premise\":";
  AppendJsonString(out, pair.slots.subject_premise);
  out += ",\"subject_hypothesis\":";
  AppendJsonString(out, pair.slots.subject_hypothesis);
  out += ",\"verb\":";
  AppendJsonString(out, pair.slots.verb);
  out += ",\"object\":";
  AppendJsonString(out, pair.slots.object);
  out += "}}";
  return out;
}

TemplatePair PairFromJsonLine(std::string_view line) {
  try {
    const nlohmann::json doc = nlohmann::json::parse(line);
    TemplatePair pair;
    pair.id = doc.at("id").get<std::string>();
    pair.probe = ParseProbe(doc.at("probe").get<std::string>());
    pair.premise = doc.at("premise").get<std::string>();
    pair.hypothesis = doc.at("hypothesis").get<std::string>();
    const nlohmann::json& slots = doc.at("slots");
    pair.slots.subject_premise = slots.at("subject_premise").get<std::string>();
    pair.slots.subject_hypothesis =
        slots.at("subject_hypothesis").get<std::string>();
    pair.slots.verb = slots.at("verb").get<std::string>();
    pair.slots.object = slots.at("object").get<std::string>();
    return pair;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kParse, std::string("pair line: ") + e.what());
  } catch (const Error& e) {
    Fail(ErrorCode::kParse, std::string("pair line: ") + e.what());
  }
}

void WritePairs(const PairGenerator& generator, std::uint64_t begin,
                std::uint64_t end, std::ostream& out) {
  std::string buffer;
  buffer.reserve(1 << 16);
  for (std::uint64_t i = begin; i < end; ++i) {
    buffer += PairToJsonLine(generator.at(i));
    buffer += '\n';
    if (buffer.size() >= (1 << 16) - 512) {
      out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
      buffer.clear();
    }
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!out) Fail(ErrorCode::kIo, "write failure while writing pairs");
}

std::vector<TemplatePair> ReadPairs(std::istream& in) {
  std::vector<TemplatePair> pairs;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      pairs.push_back(PairFromJsonLine(line));
    } catch (const Error& e) {
      Fail(e.code(), "line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return pairs;
}

}  // namespace nliprobe
