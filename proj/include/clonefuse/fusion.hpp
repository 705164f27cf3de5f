// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "clonefuse/annindex.hpp"
#include "clonefuse/candidate_io.hpp"

namespace clonefuse {

enum class NormKind { kNonNorm, kMinMax, kZScore, kRrf };

struct NormalizationMethod {
  NormKind kind = NormKind::kNonNorm;
  int rrf_k = 60;

  bool operator==(const NormalizationMethod&) const = default;
};

enum class AggregationMethod { kAverage, kSum, kMax };

std::string_view to_string(NormKind kind);
std::string_view to_string(AggregationMethod agg);

struct EnsembleMethod {
  NormalizationMethod norm;
  AggregationMethod agg = AggregationMethod::kAverage;

  /// "<norm>_<agg>", e.g. "z-score_max".
  std::string name() const;
  bool operator==(const EnsembleMethod&) const = default;
};

EnsembleMethod parse_ensemble_method(std::string_view name, int rrf_k = 60);

/// The twelve (normalisation, aggregation) combinations in a fixed order.
std::vector<EnsembleMethod> all_ensemble_methods(int rrf_k = 60);

struct FusedList {
  std::vector<std::string> source_models;
  EnsembleMethod method;
  SearchParams params;
  std::vector<Candidate> items;
  /// Contributing model ids per item, sorted.
  std::vector<std::vector<std::string>> provenance;

  bool operator==(const FusedList&) const = default;
};

/// Replaces scores per method; item order is left untouched. min-max maps a
/// constant list to 0.5 and z-score (sample sigma) maps it to 0.
CandidateList normalize(const CandidateList& list, const NormalizationMethod& method);

/// Union of already-normalised lists. A pair seen once keeps its score; a
/// pair seen m times gets the average, sum or max of its m scores.
FusedList fuse(const std::vector<CandidateList>& lists, AggregationMethod agg,
               std::size_t global_top_k);

FusedList ensemble(const CandidateList& a, const CandidateList& b, const NormalizationMethod& norm,
                   AggregationMethod agg, std::size_t global_top_k);

/// View of a fused list as a plain ranked list, model id "<m1>+<m2>...".
CandidateList as_candidate_list(const FusedList& fused);
CandidateFileInfo file_info(const FusedList& fused);

}  // namespace clonefuse
