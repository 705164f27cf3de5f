// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "clonefuse/candidate_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "clonefuse/error.hpp"
#include "text_util.hpp"

namespace clonefuse {

using nlohmann::json;

namespace {

// Rounding to six decimals can push a score just under the threshold.
constexpr double kScoreSlack = 1e-6;

json params_json(const SearchParams& p) {
  return json{{"top_n_class", p.top_n_class},
              {"similarity_threshold", p.similarity_threshold},
              {"global_top_k", p.global_top_k},
              {"metric", "cosine"},
              {"backend", std::string(to_string(p.backend))}};
}

SearchParams params_from(const json& j) {
  SearchParams p;
  p.top_n_class = j.at("top_n_class").get<int>();
  p.similarity_threshold = j.at("similarity_threshold").get<double>();
  p.global_top_k = j.at("global_top_k").get<std::size_t>();
  if (j.contains("metric") && j.at("metric").get<std::string>() != "cosine") {
    throw Error(ErrorCode::kFormatViolation, "unsupported metric " + j.at("metric").dump());
  }
  if (j.contains("backend")) p.backend = parse_index_backend(j.at("backend").get<std::string>());
  return p;
}

void append_key(std::string& out, const char* side, const FunctionKey& key) {
  out += "\"";
  out += side;
  out += "_path\":";
  out += json(key.path).dump();
  out += ",\"";
  out += side;
  out += "_start\":" + std::to_string(key.start_line) + ",\"";
  out += side;
  out += "_end\":" + std::to_string(key.end_line);
}

FunctionKey key_from(const json& j, const std::string& side) {
  FunctionKey k{j.at(side + "_path").get<std::string>(), j.at(side + "_start").get<int>(),
                j.at(side + "_end").get<int>()};
  if (k.path.empty() || k.start_line < 1 || k.end_line < k.start_line) {
    throw Error(ErrorCode::kFormatViolation, "invalid " + side + " function range");
  }
  return k;
}

}  // namespace

std::string format_score(double score) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", score);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string serialize_candidates(const CandidateList& list, const CandidateFileInfo& info) {
  json header{{"model_id", list.model_id}, {"params", params_json(list.params)}};
  if (info.method) header["method"] = *info.method;
  if (!info.sources.empty()) header["sources"] = info.sources;
  std::string out = header.dump();
  out.push_back('\n');
  for (const auto& c : list.items) {
    out.push_back('{');
    append_key(out, "a", c.a);
    out.push_back(',');
    append_key(out, "b", c.b);
    out += ",\"score\":" + format_score(c.score) + "}\n";
  }
  return out;
}

void write_candidates(const std::filesystem::path& path, const CandidateList& list,
                      const CandidateFileInfo& info) {
  const std::string payload = serialize_candidates(list, info);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

CandidateList parse_candidates(std::string_view text, const std::string& source,
                               CandidateFileInfo* info) {
  CandidateList list;
  CandidateFileInfo meta;
  bool have_header = false;
  std::set<PairKey> seen;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::is_blank(lines[i])) continue;
    const std::string where = source + " line " + std::to_string(i + 1) + ": ";
    try {
      const json rec = json::parse(lines[i]);
      if (!have_header) {
        list.model_id = rec.at("model_id").get<std::string>();
        list.params = params_from(rec.at("params"));
        validate(list.params);
        if (rec.contains("method")) meta.method = rec.at("method").get<std::string>();
        if (rec.contains("sources")) meta.sources = rec.at("sources").get<std::vector<std::string>>();
        have_header = true;
        continue;
      }
      Candidate c{key_from(rec, "a"), key_from(rec, "b"), rec.at("score").get<double>()};
      if (c.a == c.b) throw Error(ErrorCode::kFormatViolation, "pair of a function with itself");
      if (!std::isfinite(c.score)) throw Error(ErrorCode::kFormatViolation, "non-finite score");
      if (c.score < list.params.similarity_threshold - kScoreSlack) {
        throw Error(ErrorCode::kFormatViolation, "score below similarity_threshold");
      }
      if (!list.items.empty() && c.score > list.items.back().score) {
        throw Error(ErrorCode::kFormatViolation, "scores are not in descending order");
      }
      if (!seen.insert(c.key()).second) throw Error(ErrorCode::kFormatViolation, "duplicate pair");
      list.items.push_back(std::move(c));
      if (list.items.size() > list.params.global_top_k) {
        throw Error(ErrorCode::kFormatViolation, "more candidates than global_top_k");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormatViolation, where + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kFormatViolation, where + e.what());
    }
  }
  if (!have_header) throw Error(ErrorCode::kFormatViolation, source + ": missing header record");
  if (info) *info = std::move(meta);
  return list;
}

CandidateList read_candidates(const std::filesystem::path& path, CandidateFileInfo* info) {
  return parse_candidates(detail::read_file(path.string()), path.string(), info);
}

}  // namespace clonefuse
