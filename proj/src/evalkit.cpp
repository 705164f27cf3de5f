// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "clonefuse/evalkit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>

#include "clonefuse/error.hpp"
#include "text_util.hpp"

namespace clonefuse {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

int parse_line_number(std::string_view s, const std::string& where) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 1) {
    throw Error(ErrorCode::kFormatViolation, where + ": bad line number '" + std::string(s) + "'");
  }
  return v;
}

double percent(std::size_t hits, std::size_t total) {
  return 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

void check_cutoffs(const std::vector<std::size_t>& cutoffs) {
  if (cutoffs.empty()) throw Error(ErrorCode::kInvalidArgument, "at least one cutoff is required");
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] < 1 || (i > 0 && cutoffs[i] <= cutoffs[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "cutoffs must be positive and strictly ascending");
    }
  }
}

bool sides_overlap(const FunctionKey& x, const FunctionKey& y, double theta) {
  return x.path == y.path && overlap_ratio(x, y) >= theta;
}

std::pair<std::string, std::string> path_pair(const FunctionKey& x, const FunctionKey& y) {
  return x.path <= y.path ? std::pair{x.path, y.path} : std::pair{y.path, x.path};
}

}  // namespace

std::string_view to_string(CloneType type) {
  switch (type) {
    case CloneType::kT1: return "T1";
    case CloneType::kT2: return "T2";
    case CloneType::kVST3: return "VST3";
    case CloneType::kST3: return "ST3";
    case CloneType::kMT3: return "MT3";
    case CloneType::kWT3T4: return "WT3/T4";
  }
  return "T1";
}

CloneType parse_clone_type(std::string_view name) {
  for (const auto t : all_clone_types()) {
    if (to_string(t) == name) return t;
  }
  throw Error(ErrorCode::kFormatViolation, "unknown clone type '" + std::string(name) + "'");
}

const std::vector<CloneType>& all_clone_types() {
  static const std::vector<CloneType> types{CloneType::kT1,  CloneType::kT2,  CloneType::kVST3,
                                            CloneType::kST3, CloneType::kMT3, CloneType::kWT3T4};
  return types;
}

bool GroundTruth::typed() const {
  return !pairs.empty() &&
         std::all_of(pairs.begin(), pairs.end(), [](const TruthPair& p) { return p.type.has_value(); });
}

GroundTruth make_ground_truth(std::vector<TruthPair> pairs) {
  std::set<PairKey> seen;
  for (auto& p : pairs) {
    p.key = canonical_pair(p.key.first, p.key.second);
    if (p.key.first == p.key.second) {
      throw Error(ErrorCode::kFormatViolation, "truth pair joins " + p.key.first.path + " with itself");
    }
    if (!seen.insert(p.key).second) {
      throw Error(ErrorCode::kFormatViolation, "duplicate truth pair " + p.key.first.path + ":" +
                                                   std::to_string(p.key.first.start_line) + " / " +
                                                   p.key.second.path + ":" +
                                                   std::to_string(p.key.second.start_line));
    }
  }
  return GroundTruth{std::move(pairs)};
}

GroundTruth parse_ground_truth(std::string_view text, const std::string& source) {
  std::vector<TruthPair> pairs;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = source + " line " + std::to_string(i + 1);
    std::vector<std::string_view> fields;
    std::size_t b = 0;
    while (true) {
      const auto comma = line.find(',', b);
      fields.push_back(trim(line.substr(b, comma == std::string_view::npos ? line.npos : comma - b)));
      if (comma == std::string_view::npos) break;
      b = comma + 1;
    }
    if (fields.size() != 6 && fields.size() != 7) {
      throw Error(ErrorCode::kFormatViolation, where + ": expected 6 or 7 fields, got " +
                                                   std::to_string(fields.size()));
    }
    const FunctionKey a{std::string(fields[0]), parse_line_number(fields[1], where),
                        parse_line_number(fields[2], where)};
    const FunctionKey c{std::string(fields[3]), parse_line_number(fields[4], where),
                        parse_line_number(fields[5], where)};
    if (a.path.empty() || c.path.empty() || a.end_line < a.start_line || c.end_line < c.start_line) {
      throw Error(ErrorCode::kFormatViolation, where + ": invalid function range");
    }
    TruthPair p{{a, c}, std::nullopt};
    if (fields.size() == 7) {
      try {
        p.type = parse_clone_type(fields[6]);
      } catch (const Error& e) {
        throw Error(ErrorCode::kFormatViolation, where + ": " + e.what());
      }
    }
    pairs.push_back(std::move(p));
  }
  try {
    return make_ground_truth(std::move(pairs));
  } catch (const Error& e) {
    throw Error(ErrorCode::kFormatViolation, source + ": " + e.what());
  }
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  return parse_ground_truth(detail::read_file(path.string()), path.string());
}

MatchMode parse_match_mode(std::string_view text) {
  if (text == "exact") return {};
  if (text == "overlap") return {MatchMode::Kind::kOverlap, 0.7};
  constexpr std::string_view prefix = "overlap:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string value(text.substr(prefix.size()));
    char* end = nullptr;
    const double theta = std::strtod(value.c_str(), &end);
    if (!value.empty() && end == value.c_str() + value.size() && theta > 0.0 && theta <= 1.0) {
      return {MatchMode::Kind::kOverlap, theta};
    }
  }
  throw Error(ErrorCode::kInvalidArgument,
              "match mode must be exact, overlap or overlap:<theta in (0,1]>, got '" + std::string(text) + "'");
}

double overlap_ratio(const FunctionKey& x, const FunctionKey& y) {
  const int inter = std::min(x.end_line, y.end_line) - std::max(x.start_line, y.start_line) + 1;
  if (inter <= 0) return 0.0;
  const int shorter = std::min(x.end_line - x.start_line + 1, y.end_line - y.start_line + 1);
  return static_cast<double>(inter) / static_cast<double>(shorter);
}

bool match_pair(const Candidate& candidate, const PairKey& truth, const MatchMode& mode) {
  if (mode.kind == MatchMode::Kind::kExact) return candidate.key() == truth;
  const auto& [t1, t2] = truth;
  return (sides_overlap(candidate.a, t1, mode.theta) && sides_overlap(candidate.b, t2, mode.theta)) ||
         (sides_overlap(candidate.a, t2, mode.theta) && sides_overlap(candidate.b, t1, mode.theta));
}

bool match_pair(const Candidate& candidate, const GroundTruth& gt, const MatchMode& mode) {
  return std::any_of(gt.pairs.begin(), gt.pairs.end(),
                     [&](const TruthPair& p) { return match_pair(candidate, p.key, mode); });
}

RecallReport RecallReport::from_values(std::vector<std::size_t> cutoffs, std::vector<double> values) {
  if (cutoffs.size() != values.size()) {
    throw Error(ErrorCode::kInvalidArgument, "cutoffs and recall values differ in length");
  }
  check_cutoffs(cutoffs);
  RecallReport r{std::move(cutoffs), std::move(values), 0.0};
  r.average = mean(r.recall_at);
  return r;
}

double RecallReport::at(std::size_t cutoff) const {
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] == cutoff) return recall_at[i];
  }
  throw Error(ErrorCode::kInvalidArgument, "no recall recorded at cutoff " + std::to_string(cutoff));
}

std::vector<std::optional<std::size_t>> first_match_ranks(const CandidateList& list,
                                                          const GroundTruth& gt,
                                                          const MatchMode& mode) {
  std::vector<std::optional<std::size_t>> out(gt.pairs.size());
  if (mode.kind == MatchMode::Kind::kExact) {
    std::unordered_map<PairKey, std::size_t, PairKeyHash> first;
    for (std::size_t r = 0; r < list.items.size(); ++r) first.try_emplace(list.items[r].key(), r);
    for (std::size_t i = 0; i < gt.pairs.size(); ++i) {
      auto it = first.find(gt.pairs[i].key);
      if (it != first.end()) out[i] = it->second;
    }
    return out;
  }
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> by_paths;
  for (std::size_t r = 0; r < list.items.size(); ++r) {
    by_paths[path_pair(list.items[r].a, list.items[r].b)].push_back(r);
  }
  for (std::size_t i = 0; i < gt.pairs.size(); ++i) {
    const auto& key = gt.pairs[i].key;
    auto it = by_paths.find(path_pair(key.first, key.second));
    if (it == by_paths.end()) continue;
    for (const auto r : it->second) {
      if (match_pair(list.items[r], key, mode)) {
        out[i] = r;
        break;
      }
    }
  }
  return out;
}

RecallReport recall_at(const CandidateList& list, const GroundTruth& gt,
                       const std::vector<std::size_t>& cutoffs, const MatchMode& mode) {
  if (gt.pairs.empty()) throw Error(ErrorCode::kEmptyGroundTruth, "ground truth has no pairs");
  check_cutoffs(cutoffs);
  const auto ranks = first_match_ranks(list, gt, mode);
  std::vector<double> values;
  for (const auto k : cutoffs) {
    std::size_t hits = 0;
    for (const auto& r : ranks) hits += (r && *r < k) ? 1 : 0;
    values.push_back(percent(hits, gt.pairs.size()));
  }
  return RecallReport::from_values(cutoffs, std::move(values));
}

TypedRecall TypedRecall::from_values(const std::map<CloneType, double>& values) {
  TypedRecall t;
  t.per_type = values;
  std::vector<double> v;
  for (const auto type : all_clone_types()) {
    auto it = values.find(type);
    if (it == values.end()) {
      t.absent.push_back(type);
    } else {
      v.push_back(it->second);
    }
  }
  t.average = mean(v);
  return t;
}

TypedRecall typed_recall(const CandidateList& list, const GroundTruth& gt, const MatchMode& mode,
                         std::optional<std::size_t> cutoff) {
  if (gt.pairs.empty()) throw Error(ErrorCode::kEmptyGroundTruth, "ground truth has no pairs");
  if (!gt.typed()) throw Error(ErrorCode::kUntypedPairs, "every truth pair needs a clone type");
  const auto ranks = first_match_ranks(list, gt, mode);
  std::map<CloneType, std::pair<std::size_t, std::size_t>> counts;  // (hits, total)
  for (std::size_t i = 0; i < gt.pairs.size(); ++i) {
    auto& [hits, total] = counts[*gt.pairs[i].type];
    ++total;
    if (ranks[i] && (!cutoff || *ranks[i] < *cutoff)) ++hits;
  }
  std::map<CloneType, double> values;
  for (const auto& [type, c] : counts) values[type] = percent(c.first, c.second);
  return TypedRecall::from_values(values);
}

double precision(const std::vector<Judgment>& labels) {
  if (labels.empty()) throw Error(ErrorCode::kEmptyLabels, "no labelled candidates");
  const auto tp = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Judgment::kTruePositive));
  return percent(tp, labels.size());
}

double precision(std::size_t true_positives, std::size_t inspected) {
  if (inspected == 0) throw Error(ErrorCode::kEmptyLabels, "no labelled candidates");
  if (true_positives > inspected) {
    throw Error(ErrorCode::kInvalidArgument, "more true positives than inspected candidates");
  }
  return percent(true_positives, inspected);
}

double max_individual(const CandidateList& a, const CandidateList& b, const GroundTruth& gt,
                      std::size_t cutoff, const MatchMode& mode) {
  return std::max(recall_at(a, gt, {cutoff}, mode).recall_at.front(),
                  recall_at(b, gt, {cutoff}, mode).recall_at.front());
}

std::map<std::string, int> dense_rank(const std::map<std::string, double>& values) {
  std::vector<double> distinct;
  for (const auto& [model, v] : values) distinct.push_back(v);
  std::sort(distinct.begin(), distinct.end(), std::greater<>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::map<std::string, int> out;
  for (const auto& [model, v] : values) {
    const auto pos = std::find(distinct.begin(), distinct.end(), v) - distinct.begin();
    out[model] = static_cast<int>(pos) + 1;
  }
  return out;
}

BordaTable borda(const std::vector<std::string>& datasets,
                 const std::map<std::string, std::map<std::string, int>>& ranks) {
  if (datasets.empty()) throw Error(ErrorCode::kInvalidArgument, "no datasets to aggregate");
  std::set<std::string> models;
  for (const auto& d : datasets) {
    auto it = ranks.find(d);
    if (it == ranks.end()) throw Error(ErrorCode::kMissingRank, "no ranks for dataset " + d);
    for (const auto& [model, r] : it->second) models.insert(model);
  }
  const int n = static_cast<int>(models.size());
  BordaTable table{datasets, {}};
  for (const auto& model : models) {
    BordaRow row{model, {}, {}, 0, 0.0};
    for (const auto& d : datasets) {
      const auto& per = ranks.at(d);
      auto it = per.find(model);
      if (it == per.end()) {
        throw Error(ErrorCode::kMissingRank, "model " + model + " has no rank in dataset " + d);
      }
      if (it->second < 1 || it->second > n) {
        throw Error(ErrorCode::kInvalidArgument, "rank of " + model + " in " + d + " is outside [1, N]");
      }
      row.ranks.push_back(it->second);
      row.counts.push_back(n + 1 - it->second);
      row.total += n + 1 - it->second;
    }
    if (row.ranks.size() > 1) {
      double m = 0.0;
      for (int r : row.ranks) m += r;
      m /= static_cast<double>(row.ranks.size());
      double ss = 0.0;
      for (int r : row.ranks) ss += (r - m) * (r - m);
      row.rank_stdev = std::sqrt(ss / static_cast<double>(row.ranks.size() - 1));
    }
    table.rows.push_back(std::move(row));
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const BordaRow& x, const BordaRow& y) { return x.total > y.total; });
  return table;
}

SymmetricDifference symmetric_difference(const CandidateList& a, const CandidateList& b) {
  std::set<PairKey> sa;
  std::set<PairKey> sb;
  for (const auto& c : a.items) sa.insert(c.key());
  for (const auto& c : b.items) sb.insert(c.key());
  SymmetricDifference out;
  std::set_symmetric_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(out.pairs));
  out.size = out.pairs.size();
  return out;
}

}  // namespace clonefuse
