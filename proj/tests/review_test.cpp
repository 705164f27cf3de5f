// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include <gtest/gtest.h>

#include "clonefuse/error.hpp"
#include "clonefuse/review.hpp"
#include "test_support.hpp"

namespace clonefuse {
namespace {

using testing::code_of;
using testing::key_of;
using testing::TempDir;

CandidateList list_of(std::size_t n) {
  CandidateList l;
  l.model_id = "m";
  l.params.global_top_k = n;
  for (std::size_t i = 0; i < n; ++i) {
    l.items.push_back({key_of(2 * i), key_of(2 * i + 1), 1.0 - 0.01 * static_cast<double>(i)});
  }
  return l;
}

std::function<std::string()> counter_clock() {
  auto n = std::make_shared<int>(0);
  return [n] { return "t" + std::to_string(++*n); };
}

TEST(Review, StopsWhenPrecisionDropsBelowFloor) {
  const auto list = list_of(10);
  ReviewSession s(list, {0.5, 0, std::nullopt}, counter_clock());
  const ReviewJudgment seq[] = {ReviewJudgment::kTruePositive, ReviewJudgment::kTruePositive,
                                ReviewJudgment::kFalsePositive, ReviewJudgment::kFalsePositive,
                                ReviewJudgment::kFalsePositive};
  for (const auto j : seq) s.judge(j);
  EXPECT_TRUE(s.done());
  const auto sum = s.summary();
  EXPECT_TRUE(sum.stopped_by_floor);
  EXPECT_EQ(sum.judged, 5u);
  EXPECT_EQ(sum.true_positives, 2u);
  EXPECT_DOUBLE_EQ(sum.precision, 40.0);
  EXPECT_EQ(code_of([&] { s.judge(ReviewJudgment::kTruePositive); }), ErrorCode::kInvalidArgument);
}

TEST(Review, GraceSkipsDuplicatesAndBudget) {
  auto list = list_of(6);
  const Candidate flipped{list.items[0].b, list.items[0].a, 0.995};
  list.items.insert(list.items.begin() + 2, flipped);
  ReviewSession s(list, {0.9, 3, std::nullopt}, counter_clock());
  EXPECT_EQ(s.judge(ReviewJudgment::kFalsePositive).rank, 1u);
  EXPECT_EQ(s.judge(ReviewJudgment::kSkip).rank, 2u);
  // Rank 3 repeats rank 1 in the other orientation and is passed over.
  EXPECT_EQ(s.next(), std::optional<std::size_t>(3));
  EXPECT_EQ(s.judge(ReviewJudgment::kFalsePositive).rank, 4u);
  EXPECT_FALSE(s.done());
  s.judge(ReviewJudgment::kTruePositive);
  EXPECT_TRUE(s.summary().stopped_by_floor);
  EXPECT_EQ(s.summary().skipped, 1u);
  EXPECT_EQ(s.summary().duplicates, 1u);

  ReviewSession capped(list_of(5), {0.0, 0, 2}, counter_clock());
  capped.judge(ReviewJudgment::kSkip);
  capped.judge(ReviewJudgment::kTruePositive);
  capped.judge(ReviewJudgment::kFalsePositive);
  EXPECT_TRUE(capped.done());
  EXPECT_FALSE(capped.summary().exhausted);

  ReviewSession all(list_of(2), {0.0, 0, std::nullopt}, counter_clock());
  all.judge(ReviewJudgment::kTruePositive);
  all.judge(ReviewJudgment::kTruePositive);
  EXPECT_TRUE(all.summary().exhausted);
  EXPECT_EQ(code_of([] { ReviewSession bad(list_of(1), {1.5, 0, std::nullopt}, counter_clock()); }),
            ErrorCode::kInvalidArgument);
}

TEST(Review, LabelRoundTrip) {
  TempDir dir;
  const LabelRecord r{3, {{"a b.c", 1, 9}, {"x\"y.c", 2, 4}, 0.5}, ReviewJudgment::kSkip, "2026-01-02T03:04:05Z"};
  testing::spit(dir / "l.jsonl", serialize_label(r) + "\n\n");
  const auto back = load_labels(dir / "l.jsonl");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].rank, 3u);
  EXPECT_EQ(back[0].pair.key(), r.pair.key());
  EXPECT_EQ(back[0].judgment, ReviewJudgment::kSkip);
  EXPECT_EQ(back[0].timestamp, r.timestamp);
  EXPECT_TRUE(load_labels(dir / "missing.jsonl").empty());
  testing::spit(dir / "bad.jsonl", "{\"rank\":1}\n");
  EXPECT_EQ(code_of([&] { load_labels(dir / "bad.jsonl"); }), ErrorCode::kFormatViolation);
  EXPECT_EQ(code_of([] { parse_review_judgment("maybe"); }), ErrorCode::kFormatViolation);
}

TEST(Review, InteractiveSessionResumesToIdenticalReport) {
  TempDir dir;
  const auto list = list_of(10);
  const ReviewOptions opts{0.5, 0, std::nullopt};
  const auto labels = dir / "labels.jsonl";

  // One pass straight through.
  std::istringstream full_in("y\ny\nn\nn\nn\n");
  std::ostringstream full_out;
  const auto full = run_review(list, dir / "full.jsonl", opts, full_in, full_out, nullptr, counter_clock());
  EXPECT_TRUE(full.stopped_by_floor);
  EXPECT_EQ(full.judged, 5u);
  EXPECT_DOUBLE_EQ(full.precision, 40.0);
  EXPECT_NE(full_out.str().find("(source unavailable)"), std::string::npos);

  // Same answers split over two sessions with a quit and an invalid reply.
  std::istringstream first_in("y\nwhat\ny\nq\n");
  std::ostringstream sink;
  const auto partial = run_review(list, labels, opts, first_in, sink, nullptr, counter_clock());
  EXPECT_EQ(partial.judged, 2u);
  EXPECT_FALSE(partial.stopped_by_floor);
  std::istringstream second_in("n\nn\nn\n");
  const auto resumed = run_review(list, labels, opts, second_in, sink, nullptr, counter_clock());
  EXPECT_EQ(resumed.judged, full.judged);
  EXPECT_EQ(resumed.true_positives, full.true_positives);
  EXPECT_EQ(resumed.precision, full.precision);
  EXPECT_EQ(resumed.stopped_by_floor, full.stopped_by_floor);
  EXPECT_EQ(load_labels(labels).size(), 5u);

  // A further run replays everything and asks nothing.
  std::istringstream none("");
  std::ostringstream quiet;
  const auto again = run_review(list, labels, opts, none, quiet, nullptr, counter_clock());
  EXPECT_EQ(again.judged, 5u);
  EXPECT_EQ(quiet.str(), "");
}

TEST(Review, ReplayRejectsForeignLabels) {
  TempDir dir;
  const auto list = list_of(3);
  const LabelRecord wrong{2, list.items[0], ReviewJudgment::kTruePositive, "t"};
  testing::spit(dir / "l.jsonl", serialize_label(wrong) + "\n");
  std::istringstream in;
  std::ostringstream out;
  EXPECT_EQ(code_of([&] { run_review(list, dir / "l.jsonl", {}, in, out, nullptr, counter_clock()); }),
            ErrorCode::kFormatViolation);
}

TEST(Review, SnippetsFromFiles) {
  TempDir dir;
  testing::spit(dir / "src/a.c", "one\ntwo\nthree\nfour\n");
  const auto load = file_snippets(dir.path());
  EXPECT_EQ(load({"src/a.c", 2, 3}), std::optional<std::string>("2  two\n3  three\n"));
  EXPECT_FALSE(load({"src/none.c", 1, 2}).has_value());
  EXPECT_EQ(utc_timestamp().size(), 20u);
}

}  // namespace
}  // namespace clonefuse
