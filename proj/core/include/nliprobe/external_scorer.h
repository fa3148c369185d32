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

// Scoring through a child process that speaks line-delimited JSON on its
// standard input/output.
//
//   child -> parent (once):  {"ready": true}
//   parent -> child:         {"id": "...", "premise": "...", "hypothesis": "..."}
//                            ... up to batch_size lines, then one blank line
//   child -> parent:         {"id": "...", "e": x, "n": y, "c": z}
//                            one per request of the batch, any order
//
// Blank lines from the child are ignored.

#ifndef NLIPROBE_EXTERNAL_SCORER_H_
#define NLIPROBE_EXTERNAL_SCORER_H_

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <sys/types.h>
#include <vector>

#include "nliprobe/scoring.h"
#include "nliprobe/templates.h"

namespace nliprobe {

// Triples whose components sum further than this from 1 are rejected;
// accepted triples are renormalised.
inline constexpr double kExternalSumTolerance = 1e-4;

struct ExternalProcessSpec {
  std::vector<std::string> argv;  // argv[0] is looked up on PATH
  std::size_t batch_size = 64;
  // How long to wait for any single line from the child.
  std::chrono::milliseconds read_timeout{std::chrono::minutes(5)};
  std::string scorer_id = "external";
};

// One child process. Not copyable; the destructor closes the child's stdin
// and reaps it (SIGTERM/SIGKILL if it lingers).
class ExternalScorer {
 public:
  // Spawns the child and waits for the ready line. Throws kTransport if the
  // child cannot be started or exits first, kProtocol for a bad handshake.
  explicit ExternalScorer(ExternalProcessSpec spec);
  ~ExternalScorer();

  ExternalScorer(const ExternalScorer&) = delete;
  ExternalScorer& operator=(const ExternalScorer&) = delete;

  const ExternalProcessSpec& spec() const { return spec_; }

  // Sends one batch (at most batch_size pairs) and collects the answers in
  // input order. On transport failure the error message carries the number
  // of pairs of this batch left unscored; see ScoreExternal for totals.
  std::vector<ScoredPair> ScoreBatch(std::span<const TemplatePair> batch);

  // Pairs answered so far in the batch that failed last (0 after success).
  std::size_t last_batch_answered() const { return last_batch_answered_; }

 private:
  enum class ReadStatus { kLine, kEof, kTimeout };
  ReadStatus ReadLine(std::string& line);
  void WriteAll(const std::string& data);
  void Shutdown();

  ExternalProcessSpec spec_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string read_buffer_;
  std::size_t last_batch_answered_ = 0;
};

// Scores every pair through one child, batch by batch. Output order follows
// input order. A transport failure reports how many pairs in total were left
// unscored.
std::vector<ScoredPair> ScoreExternal(std::span<const TemplatePair> pairs,
                                      const ExternalProcessSpec& spec);

}  // namespace nliprobe

#endif  // NLIPROBE_EXTERNAL_SCORER_H_
