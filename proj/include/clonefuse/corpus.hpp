// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace clonefuse {

enum class Language { kC, kCpp, kJava, kOther };

std::string_view to_string(Language language);
/// Accepts "c", "cpp"/"c++", "java", "other"; throws InvalidArgument otherwise.
Language parse_language(std::string_view name);

/// The (path, start, end) triple that identifies a function region.
/// Ordered lexicographically by path, then start, then end.
struct FunctionKey {
  std::string path;
  int start_line = 0;
  int end_line = 0;

  auto operator<=>(const FunctionKey&) const = default;
  bool operator==(const FunctionKey&) const = default;
};

struct FunctionKeyHash {
  std::size_t operator()(const FunctionKey& key) const noexcept;
};

/// A contiguous code region; lines are 1-based and inclusive.
struct FunctionUnit {
  std::string id;
  std::string path;
  int start_line = 0;
  int end_line = 0;
  std::string text;

  int loc() const { return end_line - start_line + 1; }
  FunctionKey key() const { return {path, start_line, end_line}; }

  bool operator==(const FunctionUnit&) const = default;
};

/// Builds a unit, deriving its id. Throws MalformedInput if the line range or
/// text violates the unit invariants.
FunctionUnit make_unit(std::string path, int start_line, int end_line, std::string text);

/// Deterministic identifier over the triple: hex of the first 128 bits of
/// SHA-256("path\0start\0end").
std::string canonical_id(std::string_view path, int start_line, int end_line);

struct CorpusManifest {
  std::string label;
  Language language = Language::kOther;
  int minloc_applied = 0;
  std::vector<FunctionUnit> units;

  bool operator==(const CorpusManifest&) const = default;
};

/// Throws DuplicateId / FormatViolation when the manifest invariants fail.
void validate(const CorpusManifest& manifest);

struct Diagnostic {
  int line = 0;
  std::string message;
};

struct ExtractResult {
  std::vector<FunctionUnit> units;
  std::vector<Diagnostic> diagnostics;
};

/// Line-oriented function finder: a signature (identifier followed by a
/// balanced parameter list) immediately followed by a brace block. Descends
/// into namespace/class/struct/extern blocks but not into function bodies.
/// On unbalanced braces, the units closed before the fault are kept and a
/// diagnostic is recorded.
ExtractResult extract_functions(std::string_view file_text, std::string_view path,
                                Language language);

std::vector<FunctionUnit> apply_minloc(const std::vector<FunctionUnit>& units, int minloc);

void store_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);
CorpusManifest load_manifest(const std::filesystem::path& path);

/// Lookup from unit id to its triple, for turning neighbour ids into pairs.
using UnitCatalog = std::unordered_map<std::string, FunctionKey>;
UnitCatalog make_catalog(const std::vector<FunctionUnit>& units);

}  // namespace clonefuse
