// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include <sys/wait.h>

#include <cstdio>

#include <gtest/gtest.h>

#include "clonefuse/candidate_io.hpp"
#include "clonefuse/corpus.hpp"
#include "test_support.hpp"

#include <json.hpp>

namespace clonefuse {
namespace {

using nlohmann::json;
using testing::TempDir;

struct Outcome {
  int code = -1;
  std::string out;
  json first;  // first stdout line parsed, when it is JSON
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Outcome cli(const std::vector<std::string>& args, const std::string& cwd = "", const std::string& stdin_text = "") {
  std::string cmd;
  if (!cwd.empty()) cmd += "cd " + quote(cwd) + " && ";
  if (!stdin_text.empty()) cmd += "printf '%s' " + quote(stdin_text) + " | ";
  cmd += quote(CLONEFUSE_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) o.out.append(buf, n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  const auto nl = o.out.find('\n');
  o.first = json::parse(o.out.substr(0, nl), nullptr, false);
  return o;
}

std::string fx(const std::string& name) { return testing::fixture(name).string(); }

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"bogus"}).code, 2);
  EXPECT_EQ(cli({"extract", "--minloc", "x", fx("two_functions.c")}).code, 2);
}

TEST(Cli, ExtractCountsUnits) {
  TempDir dir;
  const auto r = cli({"extract", "--out", (dir / "m.jsonl").string(), fx("two_functions.c")});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("2 units"), std::string::npos);
  EXPECT_EQ(r.first["units"], 2);
  EXPECT_EQ(load_manifest(dir / "m.jsonl").units.size(), 2u);
  EXPECT_EQ(cli({"extract", "--minloc", "5", fx("two_functions.c")}).first["units"], 1);
  EXPECT_EQ(cli({"extract", fx("struct_only.c")}).first["units"], 0);
  EXPECT_EQ(cli({"extract", (dir / "missing.c").string()}).code, 2);
  EXPECT_EQ(cli({"extract", "--lang", "cobol", fx("two_functions.c")}).code, 2);
}

class CliCorpus : public ::testing::Test {
 protected:
  void SetUp() override {
    testing::write_synthetic_corpus(testing::make_synthetic_corpus(60, 6, 11), dir_.path());
    root_ = dir_.path().string();
    ASSERT_EQ(cli({"extract", "--out", "m.jsonl", "src"}, root_).code, 0);
    for (const char* model : {"a", "b"}) {
      ASSERT_EQ(cli({"embed", "--manifest", "m.jsonl", "--model", model, "--dim", "32", "--code-length", "512",
                     "--seed", model[0] == 'a' ? "1" : "2", "--out", std::string(model) + ".cfv"},
                    root_)
                    .code,
                0);
      ASSERT_EQ(cli({"search", "--manifest", "m.jsonl", "--vectors", std::string(model) + ".cfv", "--top-n", "3",
                     "--top-k", "20,50", "--out", std::string(model) + ".jsonl"},
                    root_)
                    .code,
                0);
    }
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  TempDir dir_;
  std::string root_;
};

TEST_F(CliCorpus, SearchWritesOneFilePerCutoff) {
  EXPECT_EQ(read_candidates(path("a.k20.jsonl")).items.size(), 20u);
  EXPECT_EQ(read_candidates(path("a.k50.jsonl")).params.global_top_k, 50u);
  const auto full = read_candidates(path("a.jsonl"));
  EXPECT_EQ(full.model_id, "a");
  EXPECT_LE(full.items.size(), 50u);
}

TEST_F(CliCorpus, FuseEchoesMethod) {
  const auto r = cli({"fuse", "--norm", "z-score", "--agg", "max", "--out", "f.jsonl", "a.jsonl", "b.jsonl"}, root_);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.first["method"], "z-score_max");
  CandidateFileInfo info;
  read_candidates(path("f.jsonl"), &info);
  EXPECT_EQ(info.method, std::optional<std::string>("z-score_max"));
  EXPECT_EQ(info.sources, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(cli({"fuse", "--out", "g.jsonl", "a.jsonl"}, root_).code, 2);
  EXPECT_EQ(cli({"fuse", "--norm", "median", "--out", "g.jsonl", "a.jsonl", "b.jsonl"}, root_).code, 2);
}

TEST_F(CliCorpus, EvalRecall) {
  const auto r = cli({"eval", "recall", "--truth", "truth.csv", "--cutoffs", "10,50", "a.jsonl", "b.jsonl"}, root_);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.first["label"], "a");
  EXPECT_EQ(r.first["recall_at"].size(), 2u);
  EXPECT_TRUE(r.first["recall_at"].contains("50"));
  EXPECT_NE(r.out.find("\nb "), std::string::npos);
  testing::spit(path("empty.csv"), "# nothing\n");
  EXPECT_EQ(cli({"eval", "recall", "--truth", "empty.csv", "--cutoffs", "10", "a.jsonl"}, root_).code, 2);
  EXPECT_EQ(cli({"eval", "typed", "--truth", "truth.csv", "a.jsonl"}, root_).code, 2);
}

TEST_F(CliCorpus, CrossCorpusTopOne) {
  const auto r = cli({"search", "--manifest", "m.jsonl", "--vectors", "a.cfv", "--against", "m.jsonl",
                      "--against-vectors", "a.cfv", "--top-n", "1", "--threshold", "-1", "--out", "x.jsonl"},
                     root_);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(cli({"search", "--manifest", "m.jsonl", "--vectors", "a.cfv", "--against", "m.jsonl", "--against-vectors",
                 "b.cfv", "--out", "y.jsonl"},
                root_)
                .code,
            2);
  const auto list = read_candidates(path("x.jsonl"));
  std::map<FunctionKey, int> per_query;
  for (const auto& c : list.items) EXPECT_LE(++per_query[c.a], 1);
  EXPECT_FALSE(list.items.empty());
}

TEST_F(CliCorpus, ApproximateGateRefusesWithoutForce) {
  const std::vector<std::string> base{"search", "--manifest", "m.jsonl", "--vectors", "a.cfv",
                                      "--backend", "approximate", "--hnsw-m", "2", "--ef-construction", "2",
                                      "--ef-search", "1", "--top-n", "20", "--threshold", "-1", "--out", "ap.jsonl"};
  EXPECT_EQ(cli(base, root_).code, 2);
  EXPECT_FALSE(std::filesystem::exists(path("ap.jsonl")));
  auto forced = base;
  forced.push_back("--force");
  EXPECT_EQ(cli(forced, root_).code, 0);
  EXPECT_TRUE(std::filesystem::exists(path("ap.jsonl")));
}

TEST_F(CliCorpus, RunAndReviewAndPrecision) {
  const auto r = cli({"run", "--corpus", "src", "--dim", "32", "--code-length", "512", "--top-k", "100", "--top-n",
                      "3", "--methods", "rrf_sum,z-score_max", "--cutoffs", "10,100", "--truth", "truth.csv",
                      "--out-dir", "out"},
                     root_);
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(std::filesystem::exists(path("out/fused/mock-a+mock-b/rrf_sum.jsonl")));
  EXPECT_NE(r.out.find("mock-a+mock-b:z-score_max"), std::string::npos);

  const auto rv = cli({"review", "--in", "a.jsonl", "--out", "labels.jsonl", "--floor", "0.5", "--grace", "0"}, root_,
                      "y\ny\nn\nn\nn\n");
  ASSERT_EQ(rv.code, 0);
  EXPECT_EQ(rv.first["judged"], 5);
  EXPECT_EQ(rv.first["true_positives"], 2);
  const auto p = cli({"eval", "precision", "--labels", "labels.jsonl"}, root_);
  EXPECT_EQ(p.first["precision"], 40.0);
  EXPECT_NEAR(cli({"eval", "precision", "--tp", "552", "--total", "1390"}).first["precision"].get<double>(), 39.71,
              0.005);
}

TEST(Cli, StatsAndRanking) {
  const auto route = cli({"stats", "route", fx("company_c.csv")});
  ASSERT_EQ(route.code, 0);
  EXPECT_EQ(route.first["test"], "paired-t");
  EXPECT_NEAR(route.first["mean_diff"].get<double>(), -4.92, 0.02);
  EXPECT_EQ(cli({"stats", "route", fx("company_cpp.csv")}).first["test"], "wilcoxon");
  EXPECT_EQ(cli({"stats", "wilcoxon", fx("company_cpp.csv")}).first["statistic"], 11.0);
  const auto ols = cli({"stats", "ols", fx("regression_27.csv")});
  ASSERT_EQ(ols.code, 0);
  EXPECT_NEAR(ols.first["r_squared"].get<double>(), 0.445, 0.001);
  const auto borda = cli({"rank", "borda", fx("borda_averages.jsonl")});
  ASSERT_EQ(borda.code, 0);
  EXPECT_NE(borda.out.find("CuBERT"), std::string::npos);
  EXPECT_EQ(cli({"stats", "ttest", fx("missing.csv")}).code, 2);
}

TEST(Cli, ConfigFile) {
  TempDir dir;
  testing::spit(dir / "cfg.toml", "[extract]\nminloc = 5\n");
  const auto r = cli({"--config", (dir / "cfg.toml").string(), "extract", fx("two_functions.c")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.first["units"], 1);
}

}  // namespace
}  // namespace clonefuse
