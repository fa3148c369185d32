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

#include "nliprobe/external_scorer.h"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>
#include <unordered_map>

#include "json.hpp"
#include "nliprobe/error.h"

extern char** environ;

namespace nliprobe {
namespace {

using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string SysError(const std::string& what) {
  return what + ": " + std::strerror(errno);
}

void CloseFd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

std::string RequestLine(const TemplatePair& pair) {
  Json doc;
  doc["id"] = pair.id;
  doc["premise"] = pair.premise;
  doc["hypothesis"] = pair.hypothesis;
  return doc.dump() + "\n";
}

}  // namespace

ExternalScorer::ExternalScorer(ExternalProcessSpec spec) : spec_(std::move(spec)) {
  if (spec_.argv.empty()) Fail(ErrorCode::kUsage, "external scorer command is empty");
  if (spec_.batch_size == 0) Fail(ErrorCode::kUsage, "batch size must be positive");

  // A dead child must surface as EPIPE, not kill us.
  std::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) Fail(ErrorCode::kTransport, SysError("pipe"));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    Fail(ErrorCode::kTransport, SysError("pipe"));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  std::vector<char*> argv;
  for (std::string& a : spec_.argv) argv.push_back(a.data());
  argv.push_back(nullptr);

  const int rc = ::posix_spawnp(&pid_, argv[0], &actions, nullptr, argv.data(),
                                environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  if (rc != 0) {
    pid_ = -1;
    CloseFd(to_child_);
    CloseFd(from_child_);
    Fail(ErrorCode::kTransport, "cannot start '" + spec_.argv[0] +
                                    "': " + std::strerror(rc));
  }

  std::string line;
  while (true) {
    const ReadStatus status = ReadLine(line);
    if (status == ReadStatus::kEof) {
      Shutdown();
      Fail(ErrorCode::kTransport, "external scorer exited before signalling ready");
    }
    if (status == ReadStatus::kTimeout) {
      Shutdown();
      Fail(ErrorCode::kTransport, "timed out waiting for external scorer ready line");
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    bool ready = false;
    try {
      const Json doc = Json::parse(line);
      ready = doc.is_object() && doc.value("ready", false);
    } catch (const Json::exception&) {
    }
    if (!ready) {
      Shutdown();
      Fail(ErrorCode::kProtocol,
           "expected {\"ready\": true} from external scorer, got: " + line);
    }
    break;
  }
}

ExternalScorer::~ExternalScorer() { Shutdown(); }

void ExternalScorer::Shutdown() {
  CloseFd(to_child_);
  if (pid_ > 0) {
    int status = 0;
    const auto deadline = Clock::now() + std::chrono::seconds(2);
    bool reaped = false;
    while (Clock::now() < deadline) {
      const pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_ || r < 0) {
        reaped = true;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (!reaped) {
      ::kill(pid_, SIGTERM);
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      if (::waitpid(pid_, &status, WNOHANG) != pid_) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
      }
    }
    pid_ = -1;
  }
  CloseFd(from_child_);
}

ExternalScorer::ReadStatus ExternalScorer::ReadLine(std::string& line) {
  const auto deadline = Clock::now() + spec_.read_timeout;
  while (true) {
    if (const auto nl = read_buffer_.find('\n'); nl != std::string::npos) {
      line.assign(read_buffer_, 0, nl);
      read_buffer_.erase(0, nl + 1);
      return ReadStatus::kLine;
    }
    if (from_child_ < 0) return ReadStatus::kEof;
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (remaining.count() <= 0) return ReadStatus::kTimeout;
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(
                                           remaining.count(), 1 << 30)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      Fail(ErrorCode::kTransport, SysError("poll"));
    }
    if (ready == 0) return ReadStatus::kTimeout;
    char chunk[4096];
    const ssize_t got = ::read(from_child_, chunk, sizeof(chunk));
    if (got < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      Fail(ErrorCode::kTransport, SysError("read from external scorer"));
    }
    if (got == 0) {
      CloseFd(from_child_);
      if (!read_buffer_.empty()) {
        // Final line without a newline.
        line.swap(read_buffer_);
        read_buffer_.clear();
        return ReadStatus::kLine;
      }
      return ReadStatus::kEof;
    }
    read_buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

void ExternalScorer::WriteAll(const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      Fail(ErrorCode::kTransport, SysError("write to external scorer"));
    }
    done += static_cast<std::size_t>(n);
  }
}

std::vector<ScoredPair> ExternalScorer::ScoreBatch(
    std::span<const TemplatePair> batch) {
  last_batch_answered_ = 0;
  if (batch.empty()) return {};
  if (batch.size() > spec_.batch_size) {
    Fail(ErrorCode::kUsage, "batch larger than configured batch size");
  }
  if (to_child_ < 0) Fail(ErrorCode::kTransport, "external scorer is closed");

  std::unordered_map<std::string, std::size_t> pending;
  std::string request;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!pending.emplace(batch[i].id, i).second) {
      Fail(ErrorCode::kValidation, "duplicate pair id in batch: " + batch[i].id);
    }
    request += RequestLine(batch[i]);
  }
  request += "\n";
  WriteAll(request);

  std::vector<ScoredPair> out(batch.size());
  std::vector<bool> answered(batch.size(), false);
  std::string line;
  while (last_batch_answered_ < batch.size()) {
    const ReadStatus status = ReadLine(line);
    const std::size_t missing = batch.size() - last_batch_answered_;
    if (status == ReadStatus::kEof) {
      Fail(ErrorCode::kTransport,
           "external scorer exited with " + std::to_string(missing) +
               " pair(s) of the batch unscored");
    }
    if (status == ReadStatus::kTimeout) {
      Fail(ErrorCode::kTransport,
           "external scorer stopped answering with " + std::to_string(missing) +
               " pair(s) of the batch unscored");
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    Json doc;
    try {
      doc = Json::parse(line);
    } catch (const Json::parse_error&) {
      Fail(ErrorCode::kProtocol, "malformed response line: " + line);
    }
    std::string id;
    PredictionTriple triple;
    try {
      id = doc.at("id").get<std::string>();
      triple = {doc.at("e").get<double>(), doc.at("n").get<double>(),
                doc.at("c").get<double>()};
    } catch (const Json::exception&) {
      Fail(ErrorCode::kProtocol, "malformed response line: " + line);
    }
    const auto it = pending.find(id);
    if (it == pending.end()) {
      Fail(ErrorCode::kProtocol, "response for unknown id '" + id + "': " + line);
    }
    const std::size_t index = it->second;
    if (answered[index]) {
      Fail(ErrorCode::kProtocol, "duplicate response for id '" + id + "'");
    }
    ValidateTriple(triple, kExternalSumTolerance);
    out[index] = ScoredPair{id, NormalizeTriple(triple.e, triple.n, triple.c),
                            spec_.scorer_id};
    answered[index] = true;
    ++last_batch_answered_;
  }
  last_batch_answered_ = 0;
  return out;
}

std::vector<ScoredPair> ScoreExternal(std::span<const TemplatePair> pairs,
                                      const ExternalProcessSpec& spec) {
  ExternalScorer scorer(spec);
  std::vector<ScoredPair> out;
  out.reserve(pairs.size());
  for (std::size_t begin = 0; begin < pairs.size(); begin += spec.batch_size) {
    const std::size_t end = std::min(pairs.size(), begin + spec.batch_size);
    try {
      std::vector<ScoredPair> batch = scorer.ScoreBatch(pairs.subspan(begin, end - begin));
      out.insert(out.end(), std::make_move_iterator(batch.begin()),
                 std::make_move_iterator(batch.end()));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTransport) throw;
      const std::size_t unscored =
          pairs.size() - out.size() - scorer.last_batch_answered();
      Fail(ErrorCode::kTransport,
           std::string(e.what()) + "; " + std::to_string(unscored) +
               " pair(s) unscored in total");
    }
  }
  return out;
}

}  // namespace nliprobe
