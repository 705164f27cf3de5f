// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "clonefuse/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <unordered_set>

#include <json.hpp>

#include "clonefuse/error.hpp"
#include "text_util.hpp"

namespace clonefuse {

using nlohmann::json;

std::string_view to_string(Language language) {
  switch (language) {
    case Language::kC: return "c";
    case Language::kCpp: return "cpp";
    case Language::kJava: return "java";
    case Language::kOther: return "other";
  }
  return "other";
}

Language parse_language(std::string_view name) {
  if (name == "c") return Language::kC;
  if (name == "cpp" || name == "c++") return Language::kCpp;
  if (name == "java") return Language::kJava;
  if (name == "other") return Language::kOther;
  throw Error(ErrorCode::kInvalidArgument, "unknown language '" + std::string(name) + "'");
}

std::size_t FunctionKeyHash::operator()(const FunctionKey& key) const noexcept {
  std::size_t h = std::hash<std::string>{}(key.path);
  h ^= std::hash<int>{}(key.start_line) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= std::hash<int>{}(key.end_line) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::string canonical_id(std::string_view path, int start_line, int end_line) {
  std::string material(path);
  material.push_back('\0');
  material += std::to_string(start_line);
  material.push_back('\0');
  material += std::to_string(end_line);

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(material.data(), material.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  id.reserve(32);
  for (int i = 0; i < 16; ++i) {
    id.push_back(kHex[digest[i] >> 4]);
    id.push_back(kHex[digest[i] & 0xF]);
  }
  return id;
}

FunctionUnit make_unit(std::string path, int start_line, int end_line, std::string text) {
  if (start_line < 1 || end_line < start_line) {
    throw Error(ErrorCode::kMalformedInput, "invalid line range " + std::to_string(start_line) +
                                                "-" + std::to_string(end_line) + " in " + path);
  }
  if (detail::is_blank(text)) {
    throw Error(ErrorCode::kMalformedInput, "empty unit text at " + path + ":" +
                                                std::to_string(start_line));
  }
  FunctionUnit unit;
  unit.id = canonical_id(path, start_line, end_line);
  unit.path = std::move(path);
  unit.start_line = start_line;
  unit.end_line = end_line;
  unit.text = std::move(text);
  return unit;
}

void validate(const CorpusManifest& manifest) {
  if (manifest.minloc_applied < 0) {
    throw Error(ErrorCode::kFormatViolation, "minloc_applied must be non-negative");
  }
  std::unordered_set<std::string> seen;
  for (const auto& u : manifest.units) {
    if (!seen.insert(u.id).second) throw Error(ErrorCode::kDuplicateId, "duplicate unit id " + u.id);
    if (u.start_line < 1 || u.end_line < u.start_line) {
      throw Error(ErrorCode::kFormatViolation, "invalid line range for unit " + u.id);
    }
    if (u.loc() < manifest.minloc_applied) {
      throw Error(ErrorCode::kFormatViolation,
                  "unit " + u.id + " has loc " + std::to_string(u.loc()) + " < minloc_applied");
    }
  }
}

std::vector<FunctionUnit> apply_minloc(const std::vector<FunctionUnit>& units, int minloc) {
  std::vector<FunctionUnit> kept;
  std::copy_if(units.begin(), units.end(), std::back_inserter(kept),
               [minloc](const FunctionUnit& u) { return u.loc() >= minloc; });
  return kept;
}

void store_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
  validate(manifest);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  json header = {{"label", manifest.label},
                 {"language", std::string(to_string(manifest.language))},
                 {"minloc_applied", manifest.minloc_applied}};
  out << header.dump() << '\n';
  for (const auto& u : manifest.units) {
    json rec = {{"id", u.id}, {"path", u.path}, {"start", u.start_line}, {"end", u.end_line},
                {"text", u.text}};
    out << rec.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

namespace {

[[noreturn]] void violation(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kFormatViolation, "line " + std::to_string(line_no) + ": " + what);
}

template <typename T>
T require(const json& rec, const char* key, std::size_t line_no) {
  auto it = rec.find(key);
  if (it == rec.end()) violation(line_no, std::string("missing key '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    violation(line_no, std::string("key '") + key + "' has the wrong type");
  }
}

}  // namespace

CorpusManifest load_manifest(const std::filesystem::path& path) {
  const std::string data = detail::read_file(path.string());
  const auto lines = detail::split_lines(data);
  CorpusManifest manifest;
  std::unordered_set<std::string> seen;
  bool have_header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (detail::is_blank(lines[i])) continue;
    json rec;
    try {
      rec = json::parse(lines[i]);
    } catch (const json::exception&) {
      violation(line_no, "not a JSON record");
    }
    if (!rec.is_object()) violation(line_no, "record is not an object");
    if (!have_header) {
      manifest.label = require<std::string>(rec, "label", line_no);
      try {
        manifest.language = parse_language(require<std::string>(rec, "language", line_no));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kFormatViolation) throw;
        violation(line_no, e.what());
      }
      manifest.minloc_applied = require<int>(rec, "minloc_applied", line_no);
      if (manifest.minloc_applied < 0) violation(line_no, "minloc_applied must be non-negative");
      have_header = true;
      continue;
    }
    FunctionUnit u;
    u.id = require<std::string>(rec, "id", line_no);
    u.path = require<std::string>(rec, "path", line_no);
    u.start_line = require<int>(rec, "start", line_no);
    u.end_line = require<int>(rec, "end", line_no);
    u.text = require<std::string>(rec, "text", line_no);
    if (u.start_line < 1 || u.end_line < u.start_line) violation(line_no, "invalid line range");
    if (detail::is_blank(u.text)) violation(line_no, "empty unit text");
    if (u.id != canonical_id(u.path, u.start_line, u.end_line)) {
      violation(line_no, "id does not match (path, start, end)");
    }
    if (u.loc() < manifest.minloc_applied) violation(line_no, "unit loc below minloc_applied");
    if (!seen.insert(u.id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "line " + std::to_string(line_no) + ": duplicate unit id " + u.id);
    }
    manifest.units.push_back(std::move(u));
  }
  if (!have_header) violation(1, "missing manifest header record");
  return manifest;
}

UnitCatalog make_catalog(const std::vector<FunctionUnit>& units) {
  UnitCatalog catalog;
  catalog.reserve(units.size());
  for (const auto& u : units) catalog.emplace(u.id, u.key());
  return catalog;
}

}  // namespace clonefuse
