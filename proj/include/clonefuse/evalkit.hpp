// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clonefuse/annindex.hpp"

namespace clonefuse {

enum class CloneType { kT1, kT2, kVST3, kST3, kMT3, kWT3T4 };

std::string_view to_string(CloneType type);
/// Accepts T1, T2, VST3, ST3, MT3 and WT3/T4.
CloneType parse_clone_type(std::string_view name);
const std::vector<CloneType>& all_clone_types();

struct TruthPair {
  PairKey key;
  std::optional<CloneType> type;

  bool operator==(const TruthPair&) const = default;
};

struct GroundTruth {
  std::vector<TruthPair> pairs;

  bool typed() const;
};

/// Canonicalises and checks uniqueness; throws FormatViolation.
GroundTruth make_ground_truth(std::vector<TruthPair> pairs);

/// Line format `a_path,a_start,a_end,b_path,b_start,b_end[,type]`; `#` starts a comment.
GroundTruth parse_ground_truth(std::string_view text, const std::string& source);
GroundTruth load_ground_truth(const std::filesystem::path& path);

struct MatchMode {
  enum class Kind { kExact, kOverlap };
  Kind kind = Kind::kExact;
  double theta = 0.7;

  bool operator==(const MatchMode&) const = default;
};

/// "exact", "overlap" (theta 0.7) or "overlap:<theta>".
MatchMode parse_match_mode(std::string_view text);

/// |intersection| / |shorter interval| of two inclusive line ranges on one path.
double overlap_ratio(const FunctionKey& x, const FunctionKey& y);

/// Orientation-insensitive match of a candidate to one truth pair.
bool match_pair(const Candidate& candidate, const PairKey& truth, const MatchMode& mode);
bool match_pair(const Candidate& candidate, const GroundTruth& gt, const MatchMode& mode);

struct RecallReport {
  std::vector<std::size_t> cutoffs;
  std::vector<double> recall_at;  // percentages, parallel to cutoffs
  double average = 0.0;

  /// Builds a report from already-known percentages.
  static RecallReport from_values(std::vector<std::size_t> cutoffs, std::vector<double> values);
  double at(std::size_t cutoff) const;
};

/// Rank (0-based) of the first candidate matching each truth pair, if any.
std::vector<std::optional<std::size_t>> first_match_ranks(const CandidateList& list,
                                                          const GroundTruth& gt,
                                                          const MatchMode& mode);

RecallReport recall_at(const CandidateList& list, const GroundTruth& gt,
                       const std::vector<std::size_t>& cutoffs, const MatchMode& mode = {});

struct TypedRecall {
  std::map<CloneType, double> per_type;  // types with at least one truth pair
  std::vector<CloneType> absent;
  double average = 0.0;

  static TypedRecall from_values(const std::map<CloneType, double>& values);
};

/// Per-type recall over the whole list (or its first `cutoff` items).
TypedRecall typed_recall(const CandidateList& list, const GroundTruth& gt, const MatchMode& mode = {},
                         std::optional<std::size_t> cutoff = std::nullopt);

enum class Judgment { kTruePositive, kFalsePositive };

double precision(const std::vector<Judgment>& labels);
double precision(std::size_t true_positives, std::size_t inspected);

double max_individual(const CandidateList& a, const CandidateList& b, const GroundTruth& gt,
                      std::size_t cutoff, const MatchMode& mode = {});

/// Dense ranking by value descending: ties share a rank, ranks are consecutive.
std::map<std::string, int> dense_rank(const std::map<std::string, double>& values);

struct BordaRow {
  std::string model;
  std::vector<int> ranks;  // parallel to BordaTable::datasets
  std::vector<int> counts;
  int total = 0;
  double rank_stdev = 0.0;
};

struct BordaTable {
  std::vector<std::string> datasets;
  std::vector<BordaRow> rows;  // total descending, then model ascending
};

/// ranks[dataset][model] = rank. Throws MissingRank if a model lacks a dataset.
BordaTable borda(const std::vector<std::string>& datasets,
                 const std::map<std::string, std::map<std::string, int>>& ranks);

struct SymmetricDifference {
  std::vector<PairKey> pairs;  // sorted
  std::size_t size = 0;
};

SymmetricDifference symmetric_difference(const CandidateList& a, const CandidateList& b);

}  // namespace clonefuse
