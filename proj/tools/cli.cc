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

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "json_config.h"
#include "nliprobe/debias.h"
#include "nliprobe/embedding_set.h"
#include "nliprobe/error.h"
#include "nliprobe/external_scorer.h"
#include "nliprobe/manifest.h"
#include "nliprobe/metrics.h"
#include "nliprobe/parallel.h"
#include "nliprobe/scoring.h"
#include "nliprobe/subspace.h"
#include "nliprobe/templates.h"

namespace nliprobe::tools {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

// Lines read per block when streaming large pair/prediction files.
constexpr std::size_t kBlockLines = 1 << 16;

struct GlobalOptions {
  std::string data_dir;
  unsigned workers = 0;
  bool no_manifest = false;
};

// Word selection shared by learn-subspace, spectrum and debias.
struct WordSource {
  std::vector<std::string> words;
  std::string word_list;
  std::string words_file;

  void Register(CLI::App* app, const std::string& what) {
    app->add_option("--words", words, "Comma-separated " + what)->delimiter(',');
    app->add_option("--word-list", word_list,
                    "Bundled list: occupations, verbs, objects_things, rulers, "
                    "person_hyponyms, polarity, demonyms_test, demonyms_train, "
                    "demonyms, adherents_test, adherents_train, adherents, "
                    "countries, gendered_full, gendered_words");
    app->add_option("--words-file", words_file, "File with one word per line");
  }

  bool empty() const {
    return words.empty() && word_list.empty() && words_file.empty();
  }
};

struct ProbeArgs {
  std::string probe;
  std::string scope = "all";
  bool dedupe = false;
  std::vector<std::string> premise_subjects;
  std::vector<std::string> hypothesis_subjects;
  std::vector<std::string> verbs;
  std::vector<std::string> objects;

  void Register(CLI::App* app) {
    app->add_option("--probe", probe, "gender | nationality | religion")->required();
    app->add_option("--scope", scope,
                    "Gender object scope: all (every verb with all 184 objects) "
                    "or restricted (person objects only with interaction verbs)")
        ->check(CLI::IsMember({"all", "restricted"}))
        ->capture_default_str();
    app->add_flag("--dedupe", dedupe, "Drop repeated list entries (changes counts)");
    app->add_option("--premise-subjects", premise_subjects,
                    "Restrict premise subjects (comma-separated)")
        ->delimiter(',');
    app->add_option("--hypothesis-subjects", hypothesis_subjects,
                    "Restrict hypothesis subjects (comma-separated)")
        ->delimiter(',');
    app->add_option("--verbs", verbs, "Restrict verbs (comma-separated)")->delimiter(',');
    app->add_option("--objects", objects, "Restrict objects (comma-separated)")
        ->delimiter(',');
  }

  GenerationOptions Options() const {
    GenerationOptions o;
    o.object_scope = scope == "restricted" ? ObjectScope::kRestricted : ObjectScope::kAll;
    o.dedupe = dedupe;
    o.premise_subjects = premise_subjects;
    o.hypothesis_subjects = hypothesis_subjects;
    o.verbs = verbs;
    o.objects = objects;
    return o;
  }
};

std::string DataDir(const GlobalOptions& g) {
  return g.data_dir.empty() ? DefaultDataDirectory() : g.data_dir;
}

WordLists LoadLists(const GlobalOptions& g) {
  return WordLists::LoadFromDirectory(WordListDirectory(DataDir(g)));
}

std::vector<std::string> ReadWordFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    out.push_back(line.substr(first, line.find_last_not_of(" \t\r") - first + 1));
  }
  return out;
}

std::vector<std::string> NamedList(const WordLists& lists, const std::string& name) {
  auto concat = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  if (name == "occupations") return lists.occupations;
  if (name == "verbs") return lists.verbs;
  if (name == "objects_things") return lists.objects_things;
  if (name == "rulers") return lists.rulers;
  if (name == "person_hyponyms") return lists.person_hyponyms;
  if (name == "polarity") return lists.polarity;
  if (name == "demonyms_test") return lists.demonyms_test;
  if (name == "demonyms_train") return lists.demonyms_train;
  if (name == "demonyms") return concat(lists.demonyms_train, lists.demonyms_test);
  if (name == "adherents_test") return lists.adherents_test;
  if (name == "adherents_train") return lists.adherents_train;
  if (name == "adherents") return concat(lists.adherents_train, lists.adherents_test);
  if (name == "countries") return lists.countries;
  if (name == "gendered_full") return lists.gendered_full;
  if (name == "gendered_words") return lists.GenderedWords();
  Fail(ErrorCode::kUsage, "unknown word list '" + name + "'");
}

std::vector<std::string> ResolveWords(const WordSource& source,
                                      const GlobalOptions& g,
                                      std::vector<std::string>* inputs) {
  int given = !source.words.empty() + !source.word_list.empty() +
              !source.words_file.empty();
  if (given != 1) {
    Fail(ErrorCode::kUsage,
         "give exactly one of --words, --word-list, --words-file");
  }
  if (!source.words.empty()) return source.words;
  if (!source.words_file.empty()) {
    inputs->push_back(source.words_file);
    return ReadWordFile(source.words_file);
  }
  return NamedList(LoadLists(g), source.word_list);
}

// Splits a command line on whitespace; single or double quotes group.
std::vector<std::string> SplitCommand(const std::string& command) {
  std::vector<std::string> out;
  std::string current;
  bool have = false;
  char quote = 0;
  for (const char c : command) {
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else {
        current += c;
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      have = true;
    } else if (c == ' ' || c == '\t') {
      if (have) out.push_back(current);
      current.clear();
      have = false;
    } else {
      current += c;
      have = true;
    }
  }
  if (quote) Fail(ErrorCode::kUsage, "unbalanced quote in --command");
  if (have) out.push_back(current);
  return out;
}

std::ofstream OpenOutput(const std::string& path) {
  if (const fs::path parent = fs::path(path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  return out;
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out = OpenOutput(path);
  out << text;
  if (!out) Fail(ErrorCode::kIo, "write failure on '" + path + "'");
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return in;
}

// Reads up to `limit` non-blank lines.
std::vector<std::string> ReadBlock(std::istream& in, std::size_t limit,
                                   std::size_t& line_number,
                                   std::vector<std::size_t>& line_numbers) {
  std::vector<std::string> lines;
  line_numbers.clear();
  std::string line;
  while (lines.size() < limit && std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.push_back(std::move(line));
    line_numbers.push_back(line_number);
  }
  if (in.bad()) Fail(ErrorCode::kIo, "read error");
  return lines;
}

template <typename T, typename Parse>
std::vector<T> ParseBlock(const std::vector<std::string>& lines,
                          const std::vector<std::size_t>& line_numbers,
                          unsigned workers, Parse&& parse) {
  std::vector<T> out(lines.size());
  ParallelChunks(lines.size(), workers,
                 [&](std::size_t, std::size_t begin, std::size_t end) {
                   for (std::size_t i = begin; i < end; ++i) {
                     try {
                       out[i] = parse(lines[i]);
                     } catch (const Error& e) {
                       Fail(e.code(), "line " + std::to_string(line_numbers[i]) +
                                          ": " + e.what());
                     }
                   }
                 });
  return out;
}

std::vector<TemplatePair> ReadAllPairs(const std::string& path, unsigned workers) {
  std::ifstream in = OpenInput(path);
  std::vector<TemplatePair> pairs;
  std::size_t line_number = 0;
  std::vector<std::size_t> numbers;
  while (true) {
    const auto lines = ReadBlock(in, kBlockLines, line_number, numbers);
    if (lines.empty()) break;
    auto block = ParseBlock<TemplatePair>(lines, numbers, workers,
                                          [](const std::string& l) {
                                            return PairFromJsonLine(l);
                                          });
    pairs.insert(pairs.end(), std::make_move_iterator(block.begin()),
                 std::make_move_iterator(block.end()));
  }
  return pairs;
}

std::string ProbeOfPairs(std::span<const TemplatePair> pairs) {
  if (pairs.empty()) return "";
  const std::string probe(ProbeName(pairs.front().probe));
  for (const TemplatePair& p : pairs) {
    if (ProbeName(p.probe) != probe) return "mixed";
  }
  return probe;
}

// Records inputs and outputs of one command and writes a manifest next to
// every output file.
class RunRecorder {
 public:
  RunRecorder(const std::vector<std::string>& args, std::string config_json,
              bool enabled)
      : enabled_(enabled) {
    manifest_.command = args;
    manifest_.config_json = std::move(config_json);
    manifest_.started_at = UtcTimestamp();
    manifest_.working_directory = fs::current_path().string();
  }

  void Input(const std::string& path) {
    if (!path.empty() && path != "-") inputs_.insert(path);
  }
  void Output(const std::string& path) {
    if (!path.empty() && path != "-") outputs_.push_back(path);
  }
  void Seed(std::uint64_t seed) { manifest_.seeds.push_back(seed); }

  void Finish() {
    if (!enabled_) return;
    for (const std::string& in : inputs_) manifest_.input_digests[in] = Sha256File(in);
    for (const std::string& out : outputs_) {
      manifest_.output_digests[out] = Sha256File(out);
    }
    manifest_.finished_at = UtcTimestamp();
    for (const std::string& out : outputs_) {
      WriteManifestFile(manifest_, ManifestPathFor(out));
    }
  }

 private:
  bool enabled_;
  RunManifest manifest_;
  std::set<std::string> inputs_;
  std::vector<std::string> outputs_;
};

Json ConfigSnapshot(const CLI::App& app, const CLI::App* sub) {
  JsonConfig formatter;
  Json doc = Json::parse(formatter.to_config(&app, false, false, ""));
  // Only the active subcommand matters.
  for (const CLI::App* other : app.get_subcommands({})) {
    if (other != sub) doc.erase(other->get_name());
  }
  doc.erase("config");
  return doc;
}

void PrintSubspaceSummary(const BiasSubspace& s, std::ostream& out) {
  out << "subspace: method=" << SubspaceMethodName(s.provenance().method)
      << " dimension=" << s.dimension() << " rank=" << s.rank() << "\n";
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{
      "nliprobe: probe and reduce biased inferences of word embeddings.\n"
      "Exit codes: 0 ok, 1 unexpected failure, 2 usage, 3 parse, 4 protocol, "
      "5 validation, 6 transport, 7 lookup, 8 empty input, 9 io, 10 numeric."};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  CLI::Option* config_option =
      app.set_config("--config", "", "JSON config file; command-line flags override it");

  GlobalOptions global;
  app.add_option("--data-dir", global.data_dir,
                 "Data directory holding wordlists/ (default: $NLIPROBE_DATA_DIR "
                 "or the bundled data)");
  app.add_option("--workers", global.workers,
                 "Worker threads; 0 = available parallelism. Outputs do not "
                 "depend on it")
      ->capture_default_str();
  app.add_flag("--no-manifest", global.no_manifest,
               "Do not write <output>.manifest.json files");

  // learn-subspace ----------------------------------------------------------
  auto* learn = app.add_subcommand("learn-subspace", "Learn a bias subspace");
  std::string learn_embeddings, learn_mode = "pair", learn_output;
  std::vector<std::string> learn_pair = {"he", "she"};
  WordSource learn_words;
  std::size_t learn_k = 1;
  std::size_t learn_dimension = 0;
  std::uint64_t learn_seed = 0;
  learn->add_option("--embeddings", learn_embeddings, "Embedding text file");
  learn->add_option("--mode", learn_mode, "pair | pca | random")
      ->check(CLI::IsMember({"pair", "pca", "random"}))
      ->capture_default_str();
  learn->add_option("--pair", learn_pair, "Word pair for pair mode")
      ->delimiter(',')
      ->expected(2);
  learn_words.Register(learn, "words for pca mode");
  learn->add_option("--k", learn_k, "Principal components to keep (pca mode)")
      ->capture_default_str();
  learn->add_option("--dimension", learn_dimension,
                    "Dimension for random mode (default: embedding dimension)");
  learn->add_option("--seed", learn_seed, "Seed for random mode")->capture_default_str();
  learn->add_option("--output", learn_output, "Subspace JSON file")->required();

  // spectrum ----------------------------------------------------------------
  auto* spectrum = app.add_subcommand("spectrum", "Principal-value ratios of a word set");
  std::string spectrum_embeddings, spectrum_reference, spectrum_output;
  WordSource spectrum_words;
  std::size_t spectrum_m = 4;
  spectrum->add_option("--embeddings", spectrum_embeddings, "Embedding text file")
      ->required();
  spectrum_words.Register(spectrum, "words");
  spectrum->add_option("--m", spectrum_m, "Number of principal values")
      ->capture_default_str();
  spectrum->add_option("--reference", spectrum_reference,
                       "Subspace JSON to align the top component with");
  spectrum->add_option("--output", spectrum_output, "Write the report as JSON");

  // debias ------------------------------------------------------------------
  auto* debias = app.add_subcommand("debias", "Project a subspace out of embeddings");
  std::string debias_embeddings, debias_subspace, debias_mode = "all", debias_output,
                                                   debias_run_report;
  WordSource debias_words;
  int debias_decimals = 6;
  debias->add_option("--embeddings", debias_embeddings, "Embedding text file")->required();
  debias->add_option("--subspace", debias_subspace, "Subspace JSON")->required();
  debias->add_option("--mode", debias_mode, "all | selected")
      ->check(CLI::IsMember({"all", "selected"}))
      ->capture_default_str();
  debias_words.Register(debias, "words to project (selected mode)");
  debias->add_option("--decimals", debias_decimals, "Fractional digits in the output")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  debias->add_option("--output", debias_output, "Debiased embedding file")->required();
  debias->add_option("--run-report", debias_run_report,
                     "DebiasRun JSON (default: <output>.run.json)");

  // generate / count --------------------------------------------------------
  auto* generate = app.add_subcommand("generate", "Write template pairs as JSON lines");
  ProbeArgs generate_args;
  std::string generate_output;
  generate_args.Register(generate);
  generate->add_option("--output", generate_output, "Pairs file, or - for stdout")
      ->required();

  auto* count = app.add_subcommand("count", "Print the number of pairs a probe yields");
  ProbeArgs count_args;
  count_args.Register(count);

  // score -------------------------------------------------------------------
  auto* score = app.add_subcommand("score", "Score template pairs");
  std::string score_pairs, score_scorer = "builtin", score_embeddings, score_output,
                           score_command, score_id;
  double score_a = 5.0, score_t = 0.5;
  std::uint64_t score_seed = 0;
  std::size_t score_batch = 64;
  std::size_t score_processes = 1;
  long long score_timeout_ms = 300000;
  score->add_option("--pairs", score_pairs, "Pairs file")->required();
  score->add_option("--scorer", score_scorer, "builtin | mock | external")
      ->check(CLI::IsMember({"builtin", "mock", "external"}))
      ->capture_default_str();
  score->add_option("--embeddings", score_embeddings, "Embeddings (builtin scorer)");
  score->add_option("--a", score_a, "Builtin scorer sharpness")->capture_default_str();
  score->add_option("--t", score_t, "Builtin scorer cosine pivot")->capture_default_str();
  score->add_option("--seed", score_seed, "Mock scorer seed")->capture_default_str();
  score->add_option("--command", score_command,
                    "External scorer command line (quotes group arguments)");
  score->add_option("--batch-size", score_batch, "External batch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  score->add_option("--processes", score_processes,
                    "External scorer processes, each on a contiguous partition")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  score->add_option("--timeout-ms", score_timeout_ms,
                    "External scorer per-line read timeout")
      ->capture_default_str();
  score->add_option("--scorer-id", score_id, "Scorer id recorded in predictions");
  score->add_option("--output", score_output, "Predictions file")->required();

  // evaluate ----------------------------------------------------------------
  auto* evaluate = app.add_subcommand("evaluate", "Aggregate neutrality metrics");
  std::string eval_predictions, eval_pairs, eval_probe, eval_output, eval_table,
      eval_scorer_id;
  std::vector<double> eval_taus = {0.5, 0.7};
  bool eval_strict = false;
  std::vector<std::string> eval_groups;
  std::vector<std::string> eval_group_labels = {"entail"};
  std::size_t eval_top_k = 0;
  evaluate->add_option("--predictions", eval_predictions, "Predictions file")->required();
  evaluate->add_option("--pairs", eval_pairs,
                       "Pairs file for slot lookup (default: decode pair ids)");
  evaluate->add_option("--probe", eval_probe, "Probe name (default: from pair ids)");
  evaluate->add_option("--tau", eval_taus, "Threshold(s) for T:tau")
      ->delimiter(',')
      ->capture_default_str();
  evaluate->add_flag("--strict-ties", eval_strict,
                     "Fraction Neutral counts ties with the maximum as non-neutral");
  evaluate->add_option("--group", eval_groups,
                       "Slot filter such as premise=rude,hypothesis=iraqi (repeatable)");
  evaluate->add_option("--group-label", eval_group_labels,
                       "Label(s) averaged for each group")
      ->delimiter(',')
      ->capture_default_str();
  evaluate->add_option("--top-k", eval_top_k, "Rows per extremes table (0 = none)")
      ->capture_default_str();
  evaluate->add_option("--scorer-id", eval_scorer_id,
                       "Scorer id (default: from predictions)");
  evaluate->add_option("--output", eval_output, "Report JSON")->required();
  evaluate->add_option("--table", eval_table, "Also write a markdown table here");

  // compare -----------------------------------------------------------------
  auto* compare = app.add_subcommand("compare", "Percentage change between two reports");
  std::string compare_before, compare_after, compare_output, compare_table,
      compare_label = "after";
  compare->add_option("--before", compare_before, "Baseline report")->required();
  compare->add_option("--after", compare_after, "Report after attenuation")->required();
  compare->add_option("--label", compare_label, "Row label for the after report")
      ->capture_default_str();
  compare->add_option("--output", compare_output, "Diff JSON");
  compare->add_option("--table", compare_table, "Markdown table file");

  // control -----------------------------------------------------------------
  auto* control = app.add_subcommand(
      "control", "Random-direction control: project random unit vectors and "
                 "average the resulting reports");
  std::string control_embeddings, control_pairs, control_dir;
  std::size_t control_seeds = 8;
  std::uint64_t control_seed_base = 0;
  double control_a = 5.0, control_t = 0.5;
  std::vector<double> control_taus = {0.5, 0.7};
  bool control_strict = false;
  control->add_option("--embeddings", control_embeddings, "Embedding text file")
      ->required();
  control->add_option("--pairs", control_pairs, "Pairs file")->required();
  control->add_option("--seeds", control_seeds, "Number of random directions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  control->add_option("--seed-base", control_seed_base, "First seed")
      ->capture_default_str();
  control->add_option("--a", control_a, "Builtin scorer sharpness")->capture_default_str();
  control->add_option("--t", control_t, "Builtin scorer cosine pivot")
      ->capture_default_str();
  control->add_option("--tau", control_taus, "Threshold(s)")
      ->delimiter(',')
      ->capture_default_str();
  control->add_flag("--strict-ties", control_strict, "Strict Fraction Neutral ties");
  control->add_option("--output-dir", control_dir, "Directory for reports")->required();

  // aggregate ---------------------------------------------------------------
  auto* aggregate = app.add_subcommand(
      "aggregate", "Average token embeddings (words may repeat) into type embeddings");
  std::string aggregate_tokens, aggregate_output;
  int aggregate_decimals = 6;
  aggregate->add_option("--tokens", aggregate_tokens, "Token embedding file")->required();
  aggregate->add_option("--decimals", aggregate_decimals, "Fractional digits")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  aggregate->add_option("--output", aggregate_output, "Type embedding file")->required();

  // replay ------------------------------------------------------------------
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  std::string replay_manifest;
  bool replay_verify = false;
  replay->add_option("--manifest", replay_manifest, "Manifest JSON")->required();
  replay->add_flag("--verify", replay_verify,
                   "Fail unless the outputs are byte-identical to the recorded ones");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return kExitSuccess;
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  RunRecorder recorder(args, ConfigSnapshot(app, active).dump(),
                       !global.no_manifest);
  if (config_option->count() > 0) recorder.Input(config_option->results().front());
  const unsigned workers = ResolveWorkers(global.workers);

  try {
    if (active == learn) {
      std::optional<EmbeddingSet> set;
      if (!learn_embeddings.empty()) {
        set = LoadEmbeddingsFile(learn_embeddings);
        recorder.Input(learn_embeddings);
      }
      std::optional<BiasSubspace> subspace;
      if (learn_mode == "random") {
        const std::size_t dim = learn_dimension ? learn_dimension
                                : set           ? set->dimension()
                                                : 0;
        if (dim == 0) Fail(ErrorCode::kUsage, "random mode needs --dimension or --embeddings");
        subspace = RandomDirection(dim, learn_seed);
        recorder.Seed(learn_seed);
      } else {
        if (!set) Fail(ErrorCode::kUsage, "--embeddings is required for this mode");
        if (learn_mode == "pair") {
          subspace = DirectionFromPair(*set, learn_pair.at(0), learn_pair.at(1));
        } else {
          std::vector<std::string> inputs;
          const auto words = ResolveWords(learn_words, global, &inputs);
          for (const auto& i : inputs) recorder.Input(i);
          subspace = PrincipalSubspace(*set, words, learn_k);
        }
      }
      SaveSubspaceFile(*subspace, learn_output);
      recorder.Output(learn_output);
      PrintSubspaceSummary(*subspace, out);
    } else if (active == spectrum) {
      const EmbeddingSet set = LoadEmbeddingsFile(spectrum_embeddings);
      recorder.Input(spectrum_embeddings);
      std::vector<std::string> inputs;
      const auto words = ResolveWords(spectrum_words, global, &inputs);
      for (const auto& i : inputs) recorder.Input(i);
      std::optional<BiasSubspace> reference;
      if (!spectrum_reference.empty()) {
        reference = LoadSubspaceFile(spectrum_reference);
        recorder.Input(spectrum_reference);
      }
      const SpectrumReport report = Spectrum(
          set, words, spectrum_m, reference ? &*reference : nullptr);
      std::string header = "|";
      std::string rule = "|";
      std::string row = "|";
      for (std::size_t x = 0; x < report.ratios.size(); ++x) {
        const std::size_t nth = x + 2;
        const char* suffix = nth == 2 ? "nd" : nth == 3 ? "rd" : "th";
        header += " " + std::to_string(nth) + suffix + " |";
        rule += "---|";
        row += " " + FormatFixed(report.ratios[x], 2) + " |";
      }
      if (report.top_alignment) {
        header += " cosine |";
        rule += "---|";
        row += " " + FormatFixed(*report.top_alignment, 2) + " |";
      }
      out << header << "\n" << rule << "\n" << row << "\n";
      if (!spectrum_output.empty()) {
        Json doc;
        doc["format"] = "nliprobe.spectrum/1";
        doc["words"] = words;
        doc["singular_values"] = report.singular_values;
        doc["ratios"] = report.ratios;
        doc["top_alignment"] =
            report.top_alignment ? Json(*report.top_alignment) : Json(nullptr);
        WriteTextFile(spectrum_output, doc.dump(2) + "\n");
        recorder.Output(spectrum_output);
      }
    } else if (active == debias) {
      const EmbeddingSet set = LoadEmbeddingsFile(debias_embeddings);
      const BiasSubspace subspace = LoadSubspaceFile(debias_subspace);
      recorder.Input(debias_embeddings);
      recorder.Input(debias_subspace);
      std::optional<std::pair<EmbeddingSet, DebiasRun>> result;
      if (debias_mode == "all") {
        if (!debias_words.empty()) {
          Fail(ErrorCode::kUsage, "word selection is only valid with --mode selected");
        }
        result = DebiasAll(set, subspace, workers);
      } else {
        std::vector<std::string> inputs;
        const auto words = ResolveWords(debias_words, global, &inputs);
        for (const auto& i : inputs) recorder.Input(i);
        result = DebiasSelected(set, subspace, words);
      }
      {
        std::ofstream file = OpenOutput(debias_output);
        SaveEmbeddings(result->first, file, debias_decimals);
      }
      const std::string run_path = debias_run_report.empty()
                                       ? debias_output + ".run.json"
                                       : debias_run_report;
      WriteTextFile(run_path, DebiasRunToJson(result->second));
      recorder.Output(debias_output);
      recorder.Output(run_path);
      out << "debiased " << result->second.words_modified << " of "
          << result->first.size() << " words; max residual "
          << FormatRoundTrip(result->second.max_residual) << "\n";
    } else if (active == generate) {
      const WordLists lists = LoadLists(global);
      const PairGenerator generator(ParseProbe(generate_args.probe), lists,
                                    generate_args.Options());
      if (generate_output == "-") {
        WritePairs(generator, 0, generator.size(), out);
      } else {
        std::ofstream file = OpenOutput(generate_output);
        WritePairs(generator, 0, generator.size(), file);
        file.close();
        recorder.Output(generate_output);
        err << "wrote " << generator.size() << " pairs to " << generate_output << "\n";
      }
    } else if (active == count) {
      const WordLists lists = LoadLists(global);
      out << CountPairs(ParseProbe(count_args.probe), lists, count_args.Options())
          << "\n";
      return kExitSuccess;
    } else if (active == score) {
      recorder.Input(score_pairs);
      const std::vector<TemplatePair> pairs = ReadAllPairs(score_pairs, workers);
      std::vector<ScoredPair> scored;
      if (score_scorer == "builtin") {
        if (score_embeddings.empty()) {
          Fail(ErrorCode::kUsage, "the builtin scorer needs --embeddings");
        }
        const EmbeddingSet set = LoadEmbeddingsFile(score_embeddings);
        recorder.Input(score_embeddings);
        const BuiltinScorerParams params{score_a, score_t};
        scored = ScoreAll(
            pairs, [&](const TemplatePair& p) { return ScoreBuiltin(p, set, params); },
            score_id.empty() ? "builtin" : score_id, workers);
      } else if (score_scorer == "mock") {
        recorder.Seed(score_seed);
        scored = ScoreAll(
            pairs, [&](const TemplatePair& p) { return ScoreMock(p, score_seed); },
            score_id.empty() ? "mock" : score_id, workers);
      } else {
        ExternalProcessSpec spec;
        spec.argv = SplitCommand(score_command);
        if (spec.argv.empty()) Fail(ErrorCode::kUsage, "the external scorer needs --command");
        spec.batch_size = score_batch;
        spec.read_timeout = std::chrono::milliseconds(score_timeout_ms);
        spec.scorer_id = score_id.empty() ? "external" : score_id;
        const std::size_t processes =
            std::max<std::size_t>(1, std::min(score_processes, pairs.size()));
        std::vector<std::vector<ScoredPair>> parts(processes);
        ParallelChunks(pairs.size(), static_cast<unsigned>(processes),
                       [&](std::size_t c, std::size_t begin, std::size_t end) {
                         parts[c] = ScoreExternal(
                             std::span(pairs).subspan(begin, end - begin), spec);
                       });
        for (auto& part : parts) {
          scored.insert(scored.end(), std::make_move_iterator(part.begin()),
                        std::make_move_iterator(part.end()));
        }
      }
      {
        std::ofstream file = OpenOutput(score_output);
        WritePredictions(scored, file);
      }
      recorder.Output(score_output);
      err << "scored " << scored.size() << " pairs\n";
    } else if (active == evaluate) {
      recorder.Input(eval_predictions);
      PairIndex index;
      std::string probe = eval_probe;
      if (!eval_pairs.empty()) {
        recorder.Input(eval_pairs);
        const auto pairs = ReadAllPairs(eval_pairs, workers);
        index = PairIndex::FromPairs(pairs);
        if (probe.empty()) probe = ProbeOfPairs(pairs);
      }
      EvaluateOptions options;
      options.metrics.taus = eval_taus;
      options.metrics.tie_rule = eval_strict ? TieRule::kStrict : TieRule::kInclusive;
      for (const std::string& g : eval_groups) {
        options.group_filters.push_back(SlotFilter::Parse(g));
      }
      options.group_labels.clear();
      for (const std::string& l : eval_group_labels) {
        options.group_labels.push_back(ParseLabel(l));
      }
      options.top_k = eval_top_k;

      std::vector<ReportBuilder> builders(workers, ReportBuilder(options, index));
      std::ifstream in = OpenInput(eval_predictions);
      std::size_t line_number = 0;
      std::vector<std::size_t> numbers;
      std::string scorer_id = eval_scorer_id;
      while (true) {
        const auto lines = ReadBlock(in, kBlockLines, line_number, numbers);
        if (lines.empty()) break;
        const auto block = ParseBlock<ScoredPair>(
            lines, numbers, workers,
            [](const std::string& l) { return ScoredPairFromJsonLine(l); });
        if (scorer_id.empty()) scorer_id = block.front().scorer_id;
        if (probe.empty()) {
          probe = block.front().pair_id.substr(0, block.front().pair_id.find('/'));
        }
        ParallelChunks(block.size(), workers,
                       [&](std::size_t c, std::size_t begin, std::size_t end) {
                         for (std::size_t i = begin; i < end; ++i) {
                           builders[c].Add(block[i]);
                         }
                       });
      }
      for (std::size_t c = 1; c < builders.size(); ++c) builders[0].Merge(builders[c]);
      if (builders[0].count() == 0) {
        Fail(ErrorCode::kEmptyInput, "'" + eval_predictions + "' holds no predictions");
      }
      const NeutralityReport report = builders[0].Finish(probe, scorer_id);
      WriteTextFile(eval_output, ReportToJson(report));
      recorder.Output(eval_output);

      const std::vector<std::pair<std::string, NeutralityReport>> rows = {
          {report.scorer_id.empty() ? "report" : report.scorer_id, report}};
      std::string table = ReportTable(rows);
      if (!report.groups.empty()) {
        table += "\n| group | label | mean (0-100) | pairs |\n|---|---|---|---|\n";
        for (const GroupStat& g : report.groups) {
          table += "| " + g.filter + " | " + std::string(LabelName(g.label)) + " | " +
                   FormatFixed(100.0 * g.mean, 1) + " | " + std::to_string(g.count) +
                   " |\n";
        }
      }
      auto extremes = [&](const char* title, const std::vector<ExtremeRow>& rows_in) {
        if (rows_in.empty()) return;
        table += std::string("\n") + title +
                 "\n\n| premise | verb | object | hypothesis | ent. | cont. |\n"
                 "|---|---|---|---|---|---|\n";
        for (const ExtremeRow& r : rows_in) {
          table += "| " + r.slots.subject_premise + " | " + r.slots.verb + " | " +
                   r.slots.object + " | " + r.slots.subject_hypothesis + " | " +
                   FormatFixed(r.e, 2) + " | " + FormatFixed(r.c, 2) + " |\n";
        }
      };
      extremes("Largest entailment", report.top_entail);
      extremes("Largest contradiction", report.top_contradict);
      out << table;
      if (!eval_table.empty()) {
        WriteTextFile(eval_table, table);
        recorder.Output(eval_table);
      }
    } else if (active == compare) {
      recorder.Input(compare_before);
      recorder.Input(compare_after);
      const NeutralityReport before = ReportFromJson(ReadTextFile(compare_before));
      const NeutralityReport after = ReportFromJson(ReadTextFile(compare_after));
      const ReportDiff diff = CompareReports(before, after);
      const std::string table = DiffTable(diff, compare_label);
      out << table;
      if (!compare_output.empty()) {
        WriteTextFile(compare_output, DiffToJson(diff));
        recorder.Output(compare_output);
      }
      if (!compare_table.empty()) {
        WriteTextFile(compare_table, table);
        recorder.Output(compare_table);
      }
    } else if (active == control) {
      recorder.Input(control_embeddings);
      recorder.Input(control_pairs);
      const EmbeddingSet set = LoadEmbeddingsFile(control_embeddings);
      const std::vector<TemplatePair> pairs = ReadAllPairs(control_pairs, workers);
      if (pairs.empty()) Fail(ErrorCode::kEmptyInput, "'" + control_pairs + "' holds no pairs");
      const std::string probe = ProbeOfPairs(pairs);
      const BuiltinScorerParams params{control_a, control_t};
      EvaluateOptions options;
      options.metrics.taus = control_taus;
      options.metrics.tie_rule = control_strict ? TieRule::kStrict : TieRule::kInclusive;
      options.workers = workers;
      const PairIndex index;
      std::vector<NeutralityReport> reports;
      std::vector<std::pair<std::string, NeutralityReport>> rows;
      for (std::size_t i = 0; i < control_seeds; ++i) {
        const std::uint64_t seed = control_seed_base + i;
        recorder.Seed(seed);
        const BiasSubspace direction = RandomDirection(set.dimension(), seed);
        const EmbeddingSet projected = DebiasAll(set, direction, workers).first;
        const auto scored = ScoreAll(
            pairs,
            [&](const TemplatePair& p) { return ScoreBuiltin(p, projected, params); },
            "builtin+random", workers);
        NeutralityReport report = Evaluate(scored, index, probe, "builtin+random", options);
        const std::string path =
            (fs::path(control_dir) / ("seed-" + std::to_string(seed) + ".report.json"))
                .string();
        WriteTextFile(path, ReportToJson(report));
        recorder.Output(path);
        rows.emplace_back("seed " + std::to_string(seed), report);
        reports.push_back(std::move(report));
      }
      NeutralityReport mean = AverageReports(reports);
      mean.scorer_id = "builtin+random-mean-of-" + std::to_string(control_seeds);
      const std::string mean_path = (fs::path(control_dir) / "control.report.json").string();
      WriteTextFile(mean_path, ReportToJson(mean));
      recorder.Output(mean_path);
      rows.emplace_back("rand (mean)", mean);
      out << ReportTable(rows);
    } else if (active == aggregate) {
      recorder.Input(aggregate_tokens);
      std::ifstream in = OpenInput(aggregate_tokens);
      const EmbeddingSet types = AggregateTypeEmbeddings(in);
      {
        std::ofstream file = OpenOutput(aggregate_output);
        SaveEmbeddings(types, file, aggregate_decimals);
      }
      recorder.Output(aggregate_output);
      out << "aggregated " << types.size() << " word types\n";
    } else if (active == replay) {
      const RunManifest manifest = ReadManifestFile(replay_manifest);
      struct RestoreDirectory {
        fs::path saved = fs::current_path();
        ~RestoreDirectory() { fs::current_path(saved); }
      } restore;
      if (!manifest.working_directory.empty()) {
        fs::current_path(manifest.working_directory);
      }
      for (const auto& [path, digest] : manifest.input_digests) {
        if (Sha256File(path) != digest) {
          Fail(ErrorCode::kValidation, "input '" + path + "' changed since the recorded run");
        }
      }
      if (manifest.tool_version != ToolVersion()) {
        err << "warning: manifest written by nliprobe " << manifest.tool_version
            << ", running " << ToolVersion() << "\n";
      }
      if (!manifest.command.empty() && manifest.command.front() == "replay") {
        Fail(ErrorCode::kUsage, "refusing to replay a replay");
      }
      const int rc = RunCli(manifest.command, out, err);
      if (rc != kExitSuccess) return rc;
      if (replay_verify) {
        for (const auto& [path, digest] : manifest.output_digests) {
          if (Sha256File(path) != digest) {
            Fail(ErrorCode::kValidation,
                 "output '" + path + "' differs from the recorded run");
          }
        }
        out << "verified " << manifest.output_digests.size()
            << " output(s) byte-identical\n";
      }
      return kExitSuccess;
    }
    recorder.Finish();
  } catch (const Error& e) {
    err << "error (" << ErrorCodeName(e.code()) << "): " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitSuccess;
}

}  // namespace nliprobe::tools
