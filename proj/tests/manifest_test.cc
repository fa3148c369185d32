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

#include <gtest/gtest.h>

#include "nliprobe/error.h"
#include "test_util.h"

namespace nliprobe {
namespace {

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(Sha256Hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  testing::TempDir dir;
  testing::WriteFile(dir.file("abc.txt"), "abc");
  EXPECT_EQ(Sha256File(dir.file("abc.txt")), Sha256Hex("abc"));
  EXPECT_THROW(Sha256File(dir.file("missing")), Error);
}

TEST(Manifest, RoundTrip) {
  RunManifest m;
  m.command = {"score", "--pairs", "p.jsonl"};
  m.config_json = R"({"score":{"pairs":"p.jsonl"}})";
  m.input_digests = {{"p.jsonl", Sha256Hex("x")}};
  m.output_digests = {{"out.jsonl", Sha256Hex("y")}};
  m.seeds = {1, 18446744073709551615ull};
  m.working_directory = "/tmp";
  m.started_at = UtcTimestamp();
  m.finished_at = m.started_at;
  const RunManifest back = ManifestFromJson(ManifestToJson(m));
  EXPECT_EQ(back.command, m.command);
  EXPECT_EQ(back.config_json, m.config_json);
  EXPECT_EQ(back.input_digests, m.input_digests);
  EXPECT_EQ(back.output_digests, m.output_digests);
  EXPECT_EQ(back.seeds, m.seeds);
  EXPECT_EQ(back.tool_version, ToolVersion());
  EXPECT_EQ(back.working_directory, "/tmp");
  EXPECT_EQ(back.started_at, m.started_at);
  EXPECT_EQ(ManifestPathFor("a/b.json"), "a/b.json.manifest.json");
  EXPECT_THROW(ManifestFromJson("{}"), Error);
}

TEST(UtcTimestamp, Iso8601) {
  const std::string t = UtcTimestamp();
  ASSERT_EQ(t.size(), 20u);
  EXPECT_EQ(t[4], '-');
  EXPECT_EQ(t[10], 'T');
  EXPECT_EQ(t.back(), 'Z');
}

}  // namespace
}  // namespace nliprobe
