// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "clonefuse/error.hpp"
#include "clonefuse/evalkit.hpp"
#include "reference_tables.hpp"
#include "test_support.hpp"

namespace clonefuse {
namespace {

using testing::code_of;
using testing::key_of;
using testing::Rng;

CandidateList ranked(const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  CandidateList l;
  l.model_id = "m";
  l.params.global_top_k = pairs.size() + 1;
  double score = 1.0;
  for (const auto& [x, y] : pairs) {
    l.items.push_back({key_of(x), key_of(y), score});
    score -= 0.001;
  }
  return l;
}

GroundTruth truth(const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                  std::vector<std::optional<CloneType>> types = {}) {
  std::vector<TruthPair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out.push_back({{key_of(pairs[i].first), key_of(pairs[i].second)}, i < types.size() ? types[i] : std::nullopt});
  }
  return make_ground_truth(out);
}

TEST(MatchPair, Examples) {
  const Candidate c{{"f.c", 10, 20}, {"g.c", 1, 9}, 0.9};
  EXPECT_TRUE(match_pair(c, canonical_pair({"g.c", 1, 9}, {"f.c", 10, 20}), MatchMode{}));
  const PairKey drifted = canonical_pair({"f.c", 10, 19}, {"g.c", 1, 9});
  EXPECT_FALSE(match_pair(c, drifted, MatchMode{}));
  EXPECT_TRUE(match_pair(c, drifted, MatchMode{MatchMode::Kind::kOverlap, 0.7}));
  EXPECT_DOUBLE_EQ(overlap_ratio({"f.c", 10, 20}, {"f.c", 10, 19}), 1.0);
  const PairKey other = canonical_pair({"h.c", 10, 20}, {"g.c", 1, 9});
  EXPECT_FALSE(match_pair(c, other, MatchMode{}));
  EXPECT_FALSE(match_pair(c, other, MatchMode{MatchMode::Kind::kOverlap, 0.7}));
  EXPECT_FALSE(match_pair(c, canonical_pair({"f.c", 18, 40}, {"g.c", 1, 9}), MatchMode{MatchMode::Kind::kOverlap, 0.7}));
}

TEST(MatchPair, ModeParsing) {
  EXPECT_EQ(parse_match_mode("exact"), MatchMode{});
  EXPECT_EQ(parse_match_mode("overlap").theta, 0.7);
  EXPECT_EQ(parse_match_mode("overlap:0.5").theta, 0.5);
  EXPECT_EQ(code_of([] { parse_match_mode("overlap:1.5"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { parse_match_mode("fuzzy"); }), ErrorCode::kInvalidArgument);
}

TEST(GroundTruthFile, ParsesAndValidates) {
  const auto gt = parse_ground_truth("# header\na.c,1,5,b.c,2,8\n\nb.c,9,12,a.c,1,5,WT3/T4\n", "gt.csv");
  ASSERT_EQ(gt.pairs.size(), 2u);
  EXPECT_FALSE(gt.typed());
  EXPECT_EQ(gt.pairs[1].type, CloneType::kWT3T4);
  EXPECT_EQ(gt.pairs[1].key.first.path, "a.c");
  EXPECT_TRUE(parse_ground_truth("a.c,1,5,b.c,2,8,T1\n", "g").typed());
  const auto msg = [](const std::string& text) {
    try {
      parse_ground_truth(text, "gt.csv");
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kFormatViolation);
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(msg("a.c,1,5\n").find("gt.csv line 1"), std::string::npos);
  EXPECT_NE(msg("a.c,1,5,b.c,2,8\na.c,1,5,b.c,x,8\n").find("line 2"), std::string::npos);
  EXPECT_NE(msg("a.c,1,5,b.c,2,8,T9\n").find("T9"), std::string::npos);
  EXPECT_NE(msg("a.c,1,5,b.c,2,8\nb.c,2,8,a.c,1,5\n").find("duplicate"), std::string::npos);
  EXPECT_NE(msg("a.c,1,5,a.c,1,5\n").find("itself"), std::string::npos);
  EXPECT_NE(msg("a.c,5,1,b.c,2,8\n").find("range"), std::string::npos);
}

TEST(Recall, Examples) {
  std::vector<std::pair<std::size_t, std::size_t>> tp;
  for (std::size_t i = 0; i < 100; ++i) tp.push_back({2 * i, 2 * i + 1});
  const auto gt = truth(tp);
  std::vector<std::pair<std::size_t, std::size_t>> found(tp.begin(), tp.begin() + 25);
  EXPECT_DOUBLE_EQ(recall_at(ranked(found), gt, {100}).at(100), 25.0);
  const auto all = recall_at(ranked(tp), gt, {50, 100});
  EXPECT_DOUBLE_EQ(all.at(50), 50.0);
  EXPECT_DOUBLE_EQ(all.at(100), 100.0);
  EXPECT_DOUBLE_EQ(all.average, 75.0);
  EXPECT_NEAR(RecallReport::from_values({10, 50, 70, 140}, {12.86, 67.14, 88.57, 95.71}).average, 66.07, 0.005);
}

TEST(Recall, CutoffCountsRanksAndOrientation) {
  const auto gt = truth({{0, 1}, {2, 3}});
  const auto list = ranked({{4, 5}, {1, 0}, {6, 7}, {3, 2}});
  const auto r = recall_at(list, gt, {1, 2, 3, 4});
  EXPECT_EQ(r.recall_at, (std::vector<double>{0.0, 50.0, 50.0, 100.0}));
  EXPECT_EQ(first_match_ranks(list, gt, {})[1], std::optional<std::size_t>(3));
  EXPECT_EQ(code_of([&] { r.at(7); }), ErrorCode::kInvalidArgument);
}

TEST(Recall, Errors) {
  const auto list = ranked({{0, 1}});
  EXPECT_EQ(code_of([&] { recall_at(list, GroundTruth{}, {10}); }), ErrorCode::kEmptyGroundTruth);
  const auto gt = truth({{0, 1}});
  EXPECT_EQ(code_of([&] { recall_at(list, gt, {}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { recall_at(list, gt, {50, 10}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { recall_at(list, gt, {0}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { RecallReport::from_values({1, 2}, {3.0}); }), ErrorCode::kInvalidArgument);
}

TEST(Recall, MonotoneInCutoffProperty) {
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto list = testing::random_list(rng, "m", 30, 60);
    std::vector<TruthPair> pairs;
    std::set<PairKey> used;
    const auto want = rng.between(1, 20);
    while (static_cast<std::int64_t>(pairs.size()) < want) {
      const auto x = rng.index(30), y = rng.index(30);
      if (x == y || !used.insert(canonical_pair(key_of(x), key_of(y))).second) continue;
      pairs.push_back({{key_of(x), key_of(y)}, std::nullopt});
    }
    const auto gt = make_ground_truth(pairs);
    std::vector<std::size_t> cutoffs;
    for (std::size_t k = 1; k <= 70; k += static_cast<std::size_t>(rng.between(1, 9))) cutoffs.push_back(k);
    const auto mode = rng.coin() ? MatchMode{} : MatchMode{MatchMode::Kind::kOverlap, 0.7};
    const auto r = recall_at(list, gt, cutoffs, mode);
    for (std::size_t i = 1; i < r.recall_at.size(); ++i) ASSERT_GE(r.recall_at[i], r.recall_at[i - 1]);
    double sum = 0;
    for (double v : r.recall_at) sum += v;
    ASSERT_NEAR(r.average, sum / static_cast<double>(r.recall_at.size()), 1e-9);
    // Relabelling the model does not change the result.
    auto renamed = list;
    renamed.model_id = "other";
    ASSERT_EQ(recall_at(renamed, gt, cutoffs, mode).recall_at, r.recall_at);
  }
}

TEST(TypedRecall, Examples) {
  EXPECT_NEAR(TypedRecall::from_values({{CloneType::kT1, 100},
                                        {CloneType::kT2, 97},
                                        {CloneType::kVST3, 98},
                                        {CloneType::kST3, 90},
                                        {CloneType::kMT3, 39},
                                        {CloneType::kWT3T4, 1}})
                  .average,
              70.83, 0.005);
  const auto gt = truth({{0, 1}, {2, 3}, {4, 5}, {6, 7}}, {CloneType::kT1, CloneType::kT1, CloneType::kMT3, CloneType::kMT3});
  const auto t = typed_recall(ranked({{0, 1}, {2, 3}, {4, 5}}), gt);
  EXPECT_DOUBLE_EQ(t.per_type.at(CloneType::kT1), 100.0);
  EXPECT_DOUBLE_EQ(t.per_type.at(CloneType::kMT3), 50.0);
  EXPECT_DOUBLE_EQ(t.average, 75.0);
  EXPECT_EQ(t.absent.size(), 4u);
  EXPECT_DOUBLE_EQ(typed_recall(ranked({{0, 1}, {2, 3}, {4, 5}}), gt, {}, 1).average, 25.0);
  EXPECT_DOUBLE_EQ(typed_recall(ranked({{0, 1}, {2, 3}, {4, 5}, {6, 7}}), gt).average, 100.0);
  EXPECT_EQ(code_of([&] { typed_recall(ranked({{0, 1}}), truth({{0, 1}})); }), ErrorCode::kUntypedPairs);
}

TEST(Precision, Examples) {
  std::vector<Judgment> labels(100, Judgment::kFalsePositive);
  std::fill(labels.begin(), labels.begin() + 30, Judgment::kTruePositive);
  EXPECT_DOUBLE_EQ(precision(labels), 30.0);
  EXPECT_NEAR(precision(552, 1390), 39.71, 0.005);
  EXPECT_NEAR(precision(251, 1390), 18.06, 0.005);
  EXPECT_NEAR(precision(213, 1390), 15.32, 0.005);
  EXPECT_DOUBLE_EQ(precision(std::vector<Judgment>(5, Judgment::kFalsePositive)), 0.0);
  EXPECT_EQ(code_of([] { precision(std::vector<Judgment>{}); }), ErrorCode::kEmptyLabels);
  EXPECT_EQ(code_of([] { precision(0, 0); }), ErrorCode::kEmptyLabels);
  EXPECT_EQ(code_of([] { precision(3, 2); }), ErrorCode::kInvalidArgument);
}

TEST(MaxIndividual, Examples) {
  std::vector<std::pair<std::size_t, std::size_t>> tp;
  for (std::size_t i = 0; i < 20; ++i) tp.push_back({2 * i, 2 * i + 1});
  const auto gt = truth(tp);
  const auto a = ranked({tp.begin(), tp.begin() + 10});
  const auto b = ranked({tp.begin(), tp.begin() + 13});
  EXPECT_DOUBLE_EQ(max_individual(a, b, gt, 40), 65.0);
  EXPECT_DOUBLE_EQ(max_individual(b, a, gt, 40), 65.0);
  EXPECT_DOUBLE_EQ(max_individual(a, a, gt, 40), 50.0);
  EXPECT_DOUBLE_EQ(max_individual(CandidateList{}, b, gt, 40), 65.0);
}

TEST(DenseRank, Examples) {
  const auto r = dense_rank({{"CT5P-110", 66.07}, {"SPTCode", 63.93}, {"CuBERT", 59.64},
                             {"CBFT", 52.15}, {"CT5", 52.15}, {"GCB", 50.36}});
  EXPECT_EQ(r, (std::map<std::string, int>{{"CT5P-110", 1}, {"SPTCode", 2}, {"CuBERT", 3},
                                           {"CBFT", 4}, {"CT5", 4}, {"GCB", 5}}));
  EXPECT_EQ(dense_rank({{"a", 1.0}, {"b", 3.0}, {"c", 2.0}}), (std::map<std::string, int>{{"a", 3}, {"b", 1}, {"c", 2}}));
  EXPECT_EQ(dense_rank({{"a", 2.0}, {"b", 2.0}}), (std::map<std::string, int>{{"a", 1}, {"b", 1}}));
}

TEST(Borda, Examples) {
  std::map<std::string, std::map<std::string, int>> ranks;
  const std::vector<std::string> datasets{"C", "C++", "BCB13"};
  for (const auto& row : testing::expected_ranking()) {
    for (std::size_t d = 0; d < 3; ++d) ranks[datasets[d]][row.model] = row.ranks[d];
  }
  const auto table = borda(datasets, ranks);
  ASSERT_EQ(table.rows.size(), 9u);
  EXPECT_EQ(table.rows[0].model, "CuBERT");
  EXPECT_EQ(table.rows[0].counts, (std::vector<int>{7, 8, 7}));
  EXPECT_EQ(table.rows[0].total, 22);
  EXPECT_NEAR(table.rows[0].rank_stdev, 0.58, 0.005);
  // Ties on the total keep model-name order.
  EXPECT_EQ(table.rows[1].model, "CT5");
  EXPECT_EQ(table.rows[2].model, "CT5P-110");
  EXPECT_EQ(table.rows[3].model, "SPTCode");
  EXPECT_NEAR(table.rows[2].rank_stdev, 3.46, 0.005);
  EXPECT_EQ(table.rows.back().model, "C4");
  EXPECT_EQ(table.rows.back().total, 4);

  ranks["C"]["GCB"] = 5;
  ranks["BCB13"].erase("GCB");
  EXPECT_EQ(code_of([&] { borda(datasets, ranks); }), ErrorCode::kMissingRank);
  EXPECT_EQ(code_of([&] { borda({"nope"}, ranks); }), ErrorCode::kMissingRank);
}

TEST(Borda, CountsMirrorDenseRanksProperty) {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const auto models = static_cast<std::size_t>(rng.between(2, 12));
    const auto nd = static_cast<std::size_t>(rng.between(1, 4));
    std::vector<std::string> datasets;
    std::map<std::string, std::map<std::string, int>> ranks;
    for (std::size_t d = 0; d < nd; ++d) {
      datasets.push_back("d" + std::to_string(d));
      std::map<std::string, double> values;
      for (std::size_t m = 0; m < models; ++m) values["m" + std::to_string(m)] = static_cast<double>(rng.between(0, 6));
      ranks[datasets.back()] = dense_rank(values);
    }
    const auto table = borda(datasets, ranks);
    const int n = static_cast<int>(models);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& row = table.rows[i];
      int total = 0;
      for (std::size_t d = 0; d < nd; ++d) {
        ASSERT_EQ(row.counts[d], n + 1 - ranks[datasets[d]][row.model]);
        total += row.counts[d];
      }
      ASSERT_EQ(row.total, total);
      if (i > 0) {
        ASSERT_GE(table.rows[i - 1].total, row.total);
      }
    }
  }
}

TEST(SymmetricDifference, Examples) {
  const auto sd = symmetric_difference(ranked({{0, 1}, {2, 3}}), ranked({{3, 2}, {4, 5}}));
  EXPECT_EQ(sd.size, 2u);
  EXPECT_EQ(sd.pairs, (std::vector<PairKey>{canonical_pair(key_of(0), key_of(1)), canonical_pair(key_of(4), key_of(5))}));
  EXPECT_EQ(symmetric_difference(ranked({{0, 1}}), ranked({{0, 1}})).size, 0u);

  std::vector<std::pair<std::size_t, std::size_t>> a, b;
  for (std::size_t i = 0; i < 100; ++i) a.push_back({0, i + 1});
  for (std::size_t i = 0; i < 30; ++i) b.push_back({0, i + 1});
  for (std::size_t i = 0; i < 50; ++i) b.push_back({1, i + 2});
  EXPECT_EQ(symmetric_difference(ranked(a), ranked(b)).size, 120u);
}

TEST(SymmetricDifference, CardinalityIdentityProperty) {
  Rng rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = testing::random_list(rng, "a", 12, 40);
    const auto b = testing::random_list(rng, "b", 12, 40);
    std::set<PairKey> sa, sb;
    for (const auto& c : a.items) sa.insert(c.key());
    for (const auto& c : b.items) sb.insert(c.key());
    std::size_t both = 0;
    for (const auto& k : sa) both += sb.count(k);
    const auto ab = symmetric_difference(a, b);
    ASSERT_EQ(ab.size, sa.size() + sb.size() - 2 * both);
    ASSERT_EQ(ab.pairs, symmetric_difference(b, a).pairs);
  }
}

TEST(ReferenceTables, AveragesReproduce) {
  for (const auto& table : testing::recall_tables()) {
    for (const auto& row : table.rows) {
      double avg = 0.0;
      if (table.cutoffs.empty()) {
        std::map<CloneType, double> values;
        for (std::size_t i = 0; i < row.values.size(); ++i) values[all_clone_types()[i]] = row.values[i];
        avg = TypedRecall::from_values(values).average;
      } else {
        avg = RecallReport::from_values(table.cutoffs, row.values).average;
      }
      EXPECT_NEAR(avg, row.average, 0.01) << table.dataset << " " << row.model;
    }
  }
}

}  // namespace
}  // namespace clonefuse
