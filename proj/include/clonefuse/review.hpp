// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clonefuse/annindex.hpp"

namespace clonefuse {

enum class ReviewJudgment { kTruePositive, kFalsePositive, kSkip };

std::string_view to_string(ReviewJudgment judgment);
ReviewJudgment parse_review_judgment(std::string_view text);

struct ReviewOptions {
  double floor = 0.2;      // stop when running precision drops below this
  std::size_t grace = 10;  // judgments before the floor applies
  std::optional<std::size_t> budget;  // optional cap on TP/FP judgments
};

struct LabelRecord {
  std::size_t rank = 0;  // 1-based position in the candidate list
  Candidate pair;
  ReviewJudgment judgment = ReviewJudgment::kSkip;
  std::string timestamp;

  bool operator==(const LabelRecord&) const = default;
};

std::string serialize_label(const LabelRecord& record);
std::vector<LabelRecord> load_labels(const std::filesystem::path& path);

struct ReviewSummary {
  std::size_t judged = 0;  // TP + FP
  std::size_t true_positives = 0;
  std::size_t skipped = 0;
  std::size_t duplicates = 0;
  double precision = 0.0;  // percentage, 0 when nothing judged
  bool stopped_by_floor = false;
  bool exhausted = false;
};

/// Labelling state machine over a ranked list. Candidates whose canonical
/// pair was already presented are skipped automatically.
class ReviewSession {
 public:
  ReviewSession(CandidateList list, ReviewOptions options, std::function<std::string()> clock);

  /// Re-applies labels from an earlier session; they must follow rank order.
  void replay(const std::vector<LabelRecord>& labels);

  bool done() const;
  /// 0-based index of the next candidate to show, if any.
  std::optional<std::size_t> next();
  LabelRecord judge(ReviewJudgment judgment);
  ReviewSummary summary() const;

 private:
  void advance();

  CandidateList list_;
  ReviewOptions options_;
  std::function<std::string()> clock_;
  std::size_t cursor_ = 0;
  std::set<PairKey> seen_;
  ReviewSummary summary_;
};

/// Reads source lines for display; a missing file yields std::nullopt.
using SnippetLoader = std::function<std::optional<std::string>(const FunctionKey&)>;
SnippetLoader file_snippets(std::filesystem::path root);

/// Interactive loop: y = true positive, n = false positive, s = skip,
/// q = quit. Labels are appended and flushed to `labels_path` one per
/// judgment; existing labels there are replayed first.
ReviewSummary run_review(const CandidateList& list, const std::filesystem::path& labels_path,
                         const ReviewOptions& options, std::istream& in, std::ostream& out,
                         const SnippetLoader& snippets, std::function<std::string()> clock);

/// UTC ISO-8601 wall clock.
std::string utc_timestamp();

}  // namespace clonefuse
