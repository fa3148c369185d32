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

#include "nliprobe/manifest.h"

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "nliprobe/error.h"

#ifndef NLIPROBE_VERSION
#define NLIPROBE_VERSION "0.0.0"
#endif

namespace nliprobe {
namespace {

using Json = nlohmann::json;

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      Fail(ErrorCode::kIo, "cannot initialise SHA-256");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void Update(const void* data, std::size_t size) {
    EVP_DigestUpdate(ctx_, data, size);
  }

  std::string HexDigest() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int size = 0;
    EVP_DigestFinal_ex(ctx_, digest.data(), &size);
    static const char* kHex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < size; ++i) {
      out += kHex[digest[i] >> 4];
      out += kHex[digest[i] & 0xf];
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string_view ToolVersion() { return NLIPROBE_VERSION; }

std::string Sha256Hex(std::string_view data) {
  Sha256 h;
  h.Update(data.data(), data.size());
  return h.HexDigest();
}

std::string Sha256File(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "' for hashing");
  Sha256 h;
  std::array<char, 1 << 16> buffer;
  while (in) {
    in.read(buffer.data(), buffer.size());
    h.Update(buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) Fail(ErrorCode::kIo, "read error while hashing '" + path + "'");
  return h.HexDigest();
}

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::string ManifestToJson(const RunManifest& m) {
  Json doc;
  doc["format"] = "nliprobe.manifest/1";
  doc["command"] = m.command;
  Json config;
  try {
    config = Json::parse(m.config_json);
  } catch (const Json::parse_error&) {
    config = m.config_json;
  }
  doc["config"] = config;
  doc["input_digests"] = m.input_digests;
  doc["output_digests"] = m.output_digests;
  doc["seeds"] = m.seeds;
  doc["tool_version"] = m.tool_version;
  doc["working_directory"] = m.working_directory;
  doc["started_at"] = m.started_at;
  doc["finished_at"] = m.finished_at;
  return doc.dump(2) + "\n";
}

RunManifest ManifestFromJson(std::string_view text) {
  try {
    const Json doc = Json::parse(text);
    if (doc.value("format", "") != "nliprobe.manifest/1") {
      Fail(ErrorCode::kParse, "manifest JSON: unsupported or missing format");
    }
    RunManifest m;
    m.command = doc.at("command").get<std::vector<std::string>>();
    m.config_json = doc.value("config", Json::object()).dump();
    m.input_digests =
        doc.value("input_digests", std::map<std::string, std::string>{});
    m.output_digests =
        doc.value("output_digests", std::map<std::string, std::string>{});
    m.seeds = doc.value("seeds", std::vector<std::uint64_t>{});
    m.tool_version = doc.value("tool_version", "");
    m.working_directory = doc.value("working_directory", "");
    m.started_at = doc.value("started_at", "");
    m.finished_at = doc.value("finished_at", "");
    return m;
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kParse, std::string("manifest JSON: ") + e.what());
  }
}

std::string ManifestPathFor(const std::string& output_path) {
  return output_path + ".manifest.json";
}

void WriteManifestFile(const RunManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << ManifestToJson(manifest);
  if (!out) Fail(ErrorCode::kIo, "write failure on '" + path + "'");
}

RunManifest ReadManifestFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ManifestFromJson(buffer.str());
}

}  // namespace nliprobe
