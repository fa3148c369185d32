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

#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "nliprobe/manifest.h"
#include "nliprobe/metrics.h"
#include "nliprobe/scoring.h"
#include "nliprobe/subspace.h"
#include "test_util.h"
#include "toy_experiment.h"

namespace nliprobe {
namespace {

using Json = nlohmann::json;
using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = tools::RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, CountPrintsPairTotals) {
  EXPECT_EQ(Cli({"count", "--probe", "nationality"}).out, "2134080\n");
  EXPECT_EQ(Cli({"count", "--probe", "religion"}).out, "1133730\n");
  EXPECT_EQ(Cli({"count", "--probe", "gender", "--premise-subjects", "nurse", "--verbs",
                 "ate", "--objects", "apple"})
                .out,
            "6\n");
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(Cli({}).code, 2);
  EXPECT_EQ(Cli({"frobnicate"}).code, 2);
  EXPECT_EQ(Cli({"count"}).code, 2);
  EXPECT_EQ(Cli({"count", "--probe", "age"}).code, 2);
  EXPECT_EQ(Cli({"count", "--probe", "gender", "--verbs", "levitated"}).code, 2);
  EXPECT_EQ(Cli({"count", "--probe", "gender", "--scope", "some"}).code, 2);
  EXPECT_EQ(Cli({"--help"}).code, 0);
}

TEST(Cli, DataDirOverride) {
  const Result r = Cli({"--data-dir", "/nonexistent", "count", "--probe", "gender"});
  EXPECT_EQ(r.code, 9);
  EXPECT_NE(r.err.find("error (io)"), std::string::npos) << r.err;
}

TEST(Cli, ConfigFileWithOverride) {
  TempDir dir;
  WriteFile(dir.file("cfg.json"), R"({"count": {"probe": "religion"}})");
  EXPECT_EQ(Cli({"--config", dir.file("cfg.json"), "count"}).out, "1133730\n");
  EXPECT_EQ(Cli({"--config", dir.file("cfg.json"), "count", "--probe", "nationality"}).out,
            "2134080\n");
  WriteFile(dir.file("bad.json"), "{nope");
  EXPECT_EQ(Cli({"--config", dir.file("bad.json"), "count"}).code, 2);
}

TEST(Cli, EvaluateEmptyPredictions) {
  TempDir dir;
  WriteFile(dir.file("empty.jsonl"), "");
  EXPECT_EQ(Cli({"evaluate", "--predictions", dir.file("empty.jsonl"), "--output",
                 dir.file("r.json")})
                .code,
            8);
  EXPECT_EQ(Cli({"evaluate", "--predictions", dir.file("missing.jsonl"), "--output",
                 dir.file("r.json")})
                .code,
            9);
  WriteFile(dir.file("bad.jsonl"), "{\"id\":\"a/b/c/d/e\",\"e\":0.5,\"n\":0.5,\"c\":0.5}\n");
  EXPECT_EQ(Cli({"evaluate", "--predictions", dir.file("bad.jsonl"), "--output",
                 dir.file("r.json")})
                .code,
            5);
}

TEST(Cli, MockPipelineWritesManifests) {
  TempDir dir;
  ASSERT_EQ(Cli({"generate", "--probe", "religion", "--premise-subjects", "rude,nice",
                 "--output", dir.file("pairs.jsonl")})
                .code,
            0);
  ASSERT_EQ(Cli({"score", "--pairs", dir.file("pairs.jsonl"), "--scorer", "mock", "--seed",
                 "4", "--output", dir.file("preds.jsonl")})
                .code,
            0);
  const Result eval = Cli({"evaluate", "--predictions", dir.file("preds.jsonl"), "--pairs",
                           dir.file("pairs.jsonl"), "--group", "premise=rude", "--top-k",
                           "2", "--tau", "0.5,0.6", "--output", dir.file("r.json"),
                           "--table", dir.file("r.md")});
  ASSERT_EQ(eval.code, 0) << eval.err;
  EXPECT_NE(eval.out.find("| T:0.6 |"), std::string::npos);
  EXPECT_EQ(ReadFile(dir.file("r.md")), eval.out);

  const NeutralityReport report = ReportFromJson(ReadFile(dir.file("r.json")));
  EXPECT_EQ(report.probe, "religion");
  EXPECT_EQ(report.scorer_id, "mock");
  EXPECT_EQ(report.count, 2u * 27 * 95 * 17);
  ASSERT_EQ(report.groups.size(), 1u);
  EXPECT_EQ(report.top_entail.size(), 2u);

  const Json manifest = Json::parse(ReadFile(dir.file("preds.jsonl.manifest.json")));
  EXPECT_EQ(manifest["format"], "nliprobe.manifest/1");
  EXPECT_EQ(manifest["seeds"], Json::array({4}));
  EXPECT_EQ(manifest["config"]["score"]["scorer"], "mock");
  EXPECT_EQ(manifest["input_digests"][dir.file("pairs.jsonl")],
            Sha256File(dir.file("pairs.jsonl")));
  EXPECT_EQ(manifest["output_digests"][dir.file("preds.jsonl")],
            Sha256File(dir.file("preds.jsonl")));
}

TEST(Cli, ReplayVerifiesOutputs) {
  TempDir dir;
  ASSERT_EQ(Cli({"generate", "--probe", "gender", "--premise-subjects", "nurse", "--output",
                 dir.file("pairs.jsonl")})
                .code,
            0);
  ASSERT_EQ(Cli({"score", "--pairs", dir.file("pairs.jsonl"), "--scorer", "mock",
                 "--output", dir.file("preds.jsonl")})
                .code,
            0);
  const std::string manifest = dir.file("preds.jsonl.manifest.json");
  const Result ok = Cli({"replay", "--manifest", manifest, "--verify"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("byte-identical"), std::string::npos);

  WriteFile(dir.file("pairs.jsonl"), ReadFile(dir.file("pairs.jsonl")) + "\n");
  EXPECT_EQ(Cli({"replay", "--manifest", manifest}).code, 5);
}

TEST(Cli, LearnDebiasSpectrum) {
  TempDir dir;
  WriteFile(dir.file("emb.txt"),
            "he 1 0 0\nshe 0 1 0\nman 0.9 0.1 0.2\nwoman 0.1 0.9 0.1\nit 0 0 1\n");
  ASSERT_EQ(Cli({"learn-subspace", "--embeddings", dir.file("emb.txt"), "--mode", "pair",
                 "--pair", "he,she", "--output", dir.file("hs.json")})
                .code,
            0);
  const Result debias = Cli({"debias", "--embeddings", dir.file("emb.txt"), "--subspace",
                             dir.file("hs.json"), "--mode", "selected", "--words", "he",
                             "--decimals", "3", "--output", dir.file("out.txt")});
  ASSERT_EQ(debias.code, 0) << debias.err;
  EXPECT_EQ(ReadFile(dir.file("out.txt")),
            "he 0.500 0.500 0.000\nshe 0.000 1.000 0.000\nman 0.900 0.100 0.200\n"
            "woman 0.100 0.900 0.100\nit 0.000 0.000 1.000\n");
  const Json run = Json::parse(ReadFile(dir.file("out.txt.run.json")));
  EXPECT_EQ(run["words_modified"], 1);

  EXPECT_EQ(Cli({"debias", "--embeddings", dir.file("emb.txt"), "--subspace",
                 dir.file("hs.json"), "--mode", "selected", "--words", "they", "--output",
                 dir.file("out2.txt")})
                .code,
            7);

  const Result pca = Cli({"learn-subspace", "--embeddings", dir.file("emb.txt"), "--mode",
                          "pca", "--words", "he,she,man,woman", "--k", "2", "--output",
                          dir.file("pca.json")});
  ASSERT_EQ(pca.code, 0) << pca.err;
  EXPECT_NE(pca.out.find("rank=2"), std::string::npos);
  EXPECT_EQ(Cli({"learn-subspace", "--mode", "random", "--dimension", "3", "--seed", "5",
                 "--output", dir.file("rand.json")})
                .code,
            0);
  EXPECT_EQ(SubspaceFromJson(ReadFile(dir.file("rand.json"))), RandomDirection(3, 5));

  const Result spectrum = Cli({"spectrum", "--embeddings", dir.file("emb.txt"), "--words",
                               "he,she,man,woman,it", "--m", "3", "--reference",
                               dir.file("hs.json"), "--output", dir.file("spec.json")});
  ASSERT_EQ(spectrum.code, 0) << spectrum.err;
  EXPECT_NE(spectrum.out.find("| 2nd | 3rd | cosine |"), std::string::npos) << spectrum.out;
  EXPECT_EQ(Json::parse(ReadFile(dir.file("spec.json")))["ratios"].size(), 2u);
}

TEST(Cli, ExternalScorerAcrossProcesses) {
  TempDir dir;
  ASSERT_EQ(Cli({"generate", "--probe", "gender", "--premise-subjects", "nurse", "--verbs",
                 "ate,owns", "--output", dir.file("pairs.jsonl")})
                .code,
            0);
  std::string first;
  for (const char* processes : {"1", "3"}) {
    const std::string out = dir.file(std::string("ext") + processes + ".jsonl");
    const Result r = Cli({"score", "--pairs", dir.file("pairs.jsonl"), "--scorer",
                          "external", "--command",
                          std::string("'") + NLIPROBE_FAKE_RESPONDER + "' hash",
                          "--batch-size", "16", "--processes", processes, "--output", out});
    ASSERT_EQ(r.code, 0) << r.err;
    if (first.empty()) {
      first = ReadFile(out);
    } else {
      EXPECT_EQ(ReadFile(out), first);
    }
  }
  EXPECT_EQ(Cli({"score", "--pairs", dir.file("pairs.jsonl"), "--scorer", "external",
                 "--command", std::string(NLIPROBE_FAKE_RESPONDER) + " omit", "--output",
                 dir.file("bad.jsonl")})
                .code,
            6);
  EXPECT_EQ(Cli({"score", "--pairs", dir.file("pairs.jsonl"), "--scorer", "external",
                 "--command", std::string(NLIPROBE_FAKE_RESPONDER) + " malformed",
                 "--output", dir.file("bad.jsonl")})
                .code,
            4);
}

TEST(Cli, Aggregate) {
  TempDir dir;
  WriteFile(dir.file("tokens.txt"), "dog 1 1\ncat 0 2\ndog 3 3\n");
  ASSERT_EQ(Cli({"aggregate", "--tokens", dir.file("tokens.txt"), "--decimals", "1",
                 "--output", dir.file("types.txt")})
                .code,
            0);
  EXPECT_EQ(ReadFile(dir.file("types.txt")), "dog 2.0 2.0\ncat 0.0 2.0\n");
}

TEST(Cli, ControlAveragesMatchSeedReports) {
  TempDir dir;
  const testing::ToyRun run = testing::RunToyExperiment(dir.path(), 2);
  ASSERT_EQ(run.control_seeds.size(), 8u);
  double nn = 0.0;
  double fn = 0.0;
  for (const NeutralityReport& r : run.control_seeds) {
    nn += r.nn / 8;
    fn += r.fn / 8;
  }
  EXPECT_NEAR(run.control_mean.nn, nn, 1e-6);
  EXPECT_NEAR(run.control_mean.fn, fn, 1e-6);
  EXPECT_EQ(run.pair_count, 450u);
  EXPECT_NE(run.control_table.find("| rand |"), std::string::npos) << run.control_table;
}

}  // namespace
}  // namespace nliprobe
