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

#ifndef NLIPROBE_MANIFEST_H_
#define NLIPROBE_MANIFEST_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace nliprobe {

std::string_view ToolVersion();

// Hex SHA-256 of a file's bytes. Throws kIo when unreadable.
std::string Sha256File(const std::string& path);
std::string Sha256Hex(std::string_view data);

// Everything needed to re-run a command and get byte-identical outputs.
// Timestamps are informational and excluded from that guarantee.
struct RunManifest {
  std::vector<std::string> command;  // argv without the program name
  std::string config_json = "{}";    // resolved options, as JSON text
  std::map<std::string, std::string> input_digests;   // path -> sha256
  std::map<std::string, std::string> output_digests;  // path -> sha256
  std::vector<std::uint64_t> seeds;
  std::string working_directory;  // relative paths resolve against this
  std::string tool_version{ToolVersion()};
  std::string started_at;   // ISO-8601 UTC
  std::string finished_at;  // ISO-8601 UTC
};

std::string UtcTimestamp();

std::string ManifestToJson(const RunManifest& manifest);
RunManifest ManifestFromJson(std::string_view text);

// Conventional location: "<output>.manifest.json".
std::string ManifestPathFor(const std::string& output_path);
void WriteManifestFile(const RunManifest& manifest, const std::string& path);
RunManifest ReadManifestFile(const std::string& path);

}  // namespace nliprobe

#endif  // NLIPROBE_MANIFEST_H_
