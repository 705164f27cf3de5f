// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "clonefuse/review.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "clonefuse/candidate_io.hpp"
#include "clonefuse/error.hpp"
#include "text_util.hpp"

namespace clonefuse {

using nlohmann::json;

std::string_view to_string(ReviewJudgment judgment) {
  switch (judgment) {
    case ReviewJudgment::kTruePositive: return "TP";
    case ReviewJudgment::kFalsePositive: return "FP";
    case ReviewJudgment::kSkip: return "skip";
  }
  return "skip";
}

ReviewJudgment parse_review_judgment(std::string_view text) {
  if (text == "TP") return ReviewJudgment::kTruePositive;
  if (text == "FP") return ReviewJudgment::kFalsePositive;
  if (text == "skip") return ReviewJudgment::kSkip;
  throw Error(ErrorCode::kFormatViolation, "unknown judgment '" + std::string(text) + "'");
}

std::string serialize_label(const LabelRecord& r) {
  return json{{"rank", r.rank},
              {"a_path", r.pair.a.path},
              {"a_start", r.pair.a.start_line},
              {"a_end", r.pair.a.end_line},
              {"b_path", r.pair.b.path},
              {"b_start", r.pair.b.start_line},
              {"b_end", r.pair.b.end_line},
              {"judgment", std::string(to_string(r.judgment))},
              {"timestamp", r.timestamp}}
      .dump();
}

std::vector<LabelRecord> load_labels(const std::filesystem::path& path) {
  std::vector<LabelRecord> out;
  if (!std::filesystem::exists(path)) return out;
  const std::string text = detail::read_file(path.string());
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::is_blank(lines[i])) continue;
    const std::string where = path.string() + " line " + std::to_string(i + 1) + ": ";
    try {
      const json j = json::parse(lines[i]);
      LabelRecord r;
      r.rank = j.at("rank").get<std::size_t>();
      r.pair.a = {j.at("a_path").get<std::string>(), j.at("a_start").get<int>(), j.at("a_end").get<int>()};
      r.pair.b = {j.at("b_path").get<std::string>(), j.at("b_start").get<int>(), j.at("b_end").get<int>()};
      r.judgment = parse_review_judgment(j.at("judgment").get<std::string>());
      r.timestamp = j.at("timestamp").get<std::string>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormatViolation, where + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kFormatViolation, where + e.what());
    }
  }
  return out;
}

ReviewSession::ReviewSession(CandidateList list, ReviewOptions options,
                             std::function<std::string()> clock)
    : list_(std::move(list)), options_(options), clock_(std::move(clock)) {
  if (!(options_.floor >= 0.0 && options_.floor <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "precision floor must lie in [0, 1]");
  }
}

void ReviewSession::advance() {
  while (cursor_ < list_.items.size() && seen_.count(list_.items[cursor_].key()) != 0) {
    ++summary_.duplicates;
    ++cursor_;
  }
  if (cursor_ >= list_.items.size()) summary_.exhausted = true;
}

bool ReviewSession::done() const {
  if (summary_.stopped_by_floor || cursor_ >= list_.items.size()) return true;
  return options_.budget && summary_.judged >= *options_.budget;
}

std::optional<std::size_t> ReviewSession::next() {
  advance();
  if (done()) return std::nullopt;
  return cursor_;
}

LabelRecord ReviewSession::judge(ReviewJudgment judgment) {
  const auto index = next();
  if (!index) throw Error(ErrorCode::kInvalidArgument, "review session is finished");
  const Candidate& c = list_.items[*index];
  seen_.insert(c.key());
  ++cursor_;
  if (judgment == ReviewJudgment::kSkip) {
    ++summary_.skipped;
  } else {
    ++summary_.judged;
    if (judgment == ReviewJudgment::kTruePositive) ++summary_.true_positives;
    const double ratio = static_cast<double>(summary_.true_positives) / static_cast<double>(summary_.judged);
    summary_.precision = 100.0 * ratio;
    if (summary_.judged >= options_.grace && ratio < options_.floor) summary_.stopped_by_floor = true;
  }
  advance();
  return LabelRecord{*index + 1, c, judgment, clock_()};
}

void ReviewSession::replay(const std::vector<LabelRecord>& labels) {
  for (const auto& label : labels) {
    const auto index = next();
    if (!index || *index + 1 != label.rank || list_.items[*index].key() != label.pair.key()) {
      throw Error(ErrorCode::kFormatViolation,
                  "label at rank " + std::to_string(label.rank) + " does not match the candidate list");
    }
    const auto ts = clock_;
    clock_ = [&label] { return label.timestamp; };
    judge(label.judgment);
    clock_ = ts;
  }
}

ReviewSummary ReviewSession::summary() const { return summary_; }

SnippetLoader file_snippets(std::filesystem::path root) {
  return [root = std::move(root)](const FunctionKey& key) -> std::optional<std::string> {
    const auto path = root / key.path;
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string line;
    std::string out;
    for (int n = 1; std::getline(in, line) && n <= key.end_line; ++n) {
      if (n >= key.start_line) out += std::to_string(n) + "  " + line + "\n";
    }
    return out;
  };
}

ReviewSummary run_review(const CandidateList& list, const std::filesystem::path& labels_path,
                         const ReviewOptions& options, std::istream& in, std::ostream& out,
                         const SnippetLoader& snippets, std::function<std::string()> clock) {
  ReviewSession session(list, options, std::move(clock));
  session.replay(load_labels(labels_path));
  std::ofstream labels(labels_path, std::ios::app);
  if (!labels) throw Error(ErrorCode::kIoError, "cannot append to " + labels_path.string());

  const auto show = [&](const char* side, const FunctionKey& key) {
    out << "--- " << side << ": " << key.path << ":" << key.start_line << "-" << key.end_line << "\n";
    const auto text = snippets ? snippets(key) : std::nullopt;
    out << (text ? *text : std::string("(source unavailable)\n"));
  };

  while (const auto index = session.next()) {
    const Candidate& c = list.items[*index];
    const auto s = session.summary();
    out << "\n=== rank " << (*index + 1) << " of " << list.items.size() << "  score "
        << format_score(c.score) << "  precision " << s.true_positives << "/" << s.judged << "\n";
    show("a", c.a);
    show("b", c.b);
    std::optional<ReviewJudgment> judgment;
    bool quit = false;
    std::string answer;
    while (!judgment && !quit) {
      out << "clone? [y]es [n]o [s]kip [q]uit: " << std::flush;
      if (!std::getline(in, answer)) {
        quit = true;
        break;
      }
      if (answer == "y") judgment = ReviewJudgment::kTruePositive;
      else if (answer == "n") judgment = ReviewJudgment::kFalsePositive;
      else if (answer == "s") judgment = ReviewJudgment::kSkip;
      else if (answer == "q") quit = true;
    }
    if (quit) break;
    labels << serialize_label(session.judge(*judgment)) << "\n" << std::flush;
    if (!labels) throw Error(ErrorCode::kIoError, "write failed for " + labels_path.string());
  }
  return session.summary();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace clonefuse
