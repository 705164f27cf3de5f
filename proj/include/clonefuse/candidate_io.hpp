// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "clonefuse/annindex.hpp"

namespace clonefuse {

/// Extra header fields carried by fused lists.
struct CandidateFileInfo {
  std::optional<std::string> method;
  std::vector<std::string> sources;

  bool operator==(const CandidateFileInfo&) const = default;
};

/// Scores are printed with six decimals; "-0.000000" is written as "0.000000".
std::string format_score(double score);

std::string serialize_candidates(const CandidateList& list, const CandidateFileInfo& info = {});
void write_candidates(const std::filesystem::path& path, const CandidateList& list,
                      const CandidateFileInfo& info = {});

/// Parses a candidate list file. Throws FormatViolation with the offending line.
CandidateList parse_candidates(std::string_view text, const std::string& source,
                               CandidateFileInfo* info = nullptr);
CandidateList read_candidates(const std::filesystem::path& path, CandidateFileInfo* info = nullptr);

}  // namespace clonefuse
