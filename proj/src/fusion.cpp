// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "clonefuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "clonefuse/error.hpp"

namespace clonefuse {

namespace {

// Threshold echo for lists whose scores are no longer similarities.
constexpr double kNoThreshold = std::numeric_limits<double>::lowest();

}  // namespace

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::kNonNorm: return "non-norm";
    case NormKind::kMinMax: return "min-max";
    case NormKind::kZScore: return "z-score";
    case NormKind::kRrf: return "rrf";
  }
  return "non-norm";
}

std::string_view to_string(AggregationMethod agg) {
  switch (agg) {
    case AggregationMethod::kAverage: return "average";
    case AggregationMethod::kSum: return "sum";
    case AggregationMethod::kMax: return "max";
  }
  return "average";
}

std::string EnsembleMethod::name() const {
  return std::string(to_string(norm.kind)) + "_" + std::string(to_string(agg));
}

EnsembleMethod parse_ensemble_method(std::string_view name, int rrf_k) {
  for (const auto& m : all_ensemble_methods(rrf_k)) {
    if (m.name() == name) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown ensembling method '" + std::string(name) + "'");
}

std::vector<EnsembleMethod> all_ensemble_methods(int rrf_k) {
  std::vector<EnsembleMethod> out;
  for (auto kind : {NormKind::kNonNorm, NormKind::kMinMax, NormKind::kZScore, NormKind::kRrf}) {
    for (auto agg : {AggregationMethod::kAverage, AggregationMethod::kSum, AggregationMethod::kMax}) {
      out.push_back({{kind, rrf_k}, agg});
    }
  }
  return out;
}

CandidateList normalize(const CandidateList& list, const NormalizationMethod& method) {
  if (method.rrf_k < 1) throw Error(ErrorCode::kInvalidArgument, "rrf_k must be >= 1");
  CandidateList out = list;
  auto& items = out.items;
  const std::size_t n = items.size();
  switch (method.kind) {
    case NormKind::kNonNorm:
      break;
    case NormKind::kMinMax: {
      if (n == 0) throw Error(ErrorCode::kEmptyList, "min-max needs a non-empty list");
      const auto [lo, hi] = std::minmax_element(items.begin(), items.end(),
                                                [](const auto& x, const auto& y) { return x.score < y.score; });
      const double min = lo->score;
      const double span = hi->score - min;
      for (auto& c : items) c.score = span > 0.0 ? (c.score - min) / span : 0.5;
      break;
    }
    case NormKind::kZScore: {
      if (n == 0) throw Error(ErrorCode::kEmptyList, "z-score needs a non-empty list");
      double mean = 0.0;
      for (const auto& c : items) mean += c.score;
      mean /= static_cast<double>(n);
      double ss = 0.0;
      for (const auto& c : items) ss += (c.score - mean) * (c.score - mean);
      const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
      for (auto& c : items) c.score = sd > 0.0 ? (c.score - mean) / sd : 0.0;
      break;
    }
    case NormKind::kRrf:
      for (std::size_t r = 0; r < n; ++r) {
        items[r].score = 1.0 / static_cast<double>(method.rrf_k + static_cast<long long>(r) + 1);
      }
      break;
  }
  // Normalised scores are not similarities; the input threshold no longer applies.
  if (method.kind != NormKind::kNonNorm) out.params.similarity_threshold = kNoThreshold;
  return out;
}

FusedList fuse(const std::vector<CandidateList>& lists, AggregationMethod agg,
               std::size_t global_top_k) {
  if (lists.size() < 2) {
    throw Error(ErrorCode::kTooFewLists, "fusion needs at least 2 lists, got " + std::to_string(lists.size()));
  }
  if (global_top_k < 1) throw Error(ErrorCode::kInvalidArgument, "global_top_k must be >= 1");

  struct Seen {
    std::vector<double> scores;
    std::vector<std::string> models;
    FunctionKey a;
    FunctionKey b;
    bool same_orientation = true;
  };
  std::map<PairKey, Seen> seen;
  for (const auto& list : lists) {
    for (const auto& c : list.items) {
      auto [it, fresh] = seen.try_emplace(c.key());
      auto& s = it->second;
      if (fresh) {
        s.a = c.a;
        s.b = c.b;
      } else if (s.a != c.a) {
        s.same_orientation = false;
      }
      s.scores.push_back(c.score);
      s.models.push_back(list.model_id);
    }
  }

  std::vector<std::pair<Candidate, std::vector<std::string>>> rows;
  rows.reserve(seen.size());
  for (auto& [key, s] : seen) {
    // Fixed summation order keeps the result independent of list order.
    std::sort(s.scores.begin(), s.scores.end());
    double score = 0.0;
    switch (agg) {
      case AggregationMethod::kAverage:
        score = std::accumulate(s.scores.begin(), s.scores.end(), 0.0) / static_cast<double>(s.scores.size());
        break;
      case AggregationMethod::kSum:
        score = std::accumulate(s.scores.begin(), s.scores.end(), 0.0);
        break;
      case AggregationMethod::kMax:
        score = s.scores.back();
        break;
    }
    std::sort(s.models.begin(), s.models.end());
    s.models.erase(std::unique(s.models.begin(), s.models.end()), s.models.end());
    Candidate c = s.same_orientation ? Candidate{s.a, s.b, score} : Candidate{key.first, key.second, score};
    rows.emplace_back(std::move(c), std::move(s.models));
  }
  std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) { return ranks_before(x.first, y.first); });
  if (rows.size() > global_top_k) rows.resize(global_top_k);

  FusedList out;
  for (const auto& list : lists) out.source_models.push_back(list.model_id);
  std::sort(out.source_models.begin(), out.source_models.end());
  out.source_models.erase(std::unique(out.source_models.begin(), out.source_models.end()),
                          out.source_models.end());
  out.method.agg = agg;
  out.params.top_n_class = 1;
  for (const auto& list : lists) {
    out.params.top_n_class = std::max(out.params.top_n_class, list.params.top_n_class);
    if (list.params.backend == IndexBackend::kApproximate) out.params.backend = IndexBackend::kApproximate;
  }
  out.params.global_top_k = global_top_k;
  out.params.similarity_threshold = kNoThreshold;
  for (auto& [c, models] : rows) {
    out.items.push_back(std::move(c));
    out.provenance.push_back(std::move(models));
  }
  return out;
}

FusedList ensemble(const CandidateList& a, const CandidateList& b, const NormalizationMethod& norm,
                   AggregationMethod agg, std::size_t global_top_k) {
  FusedList out = fuse({normalize(a, norm), normalize(b, norm)}, agg, global_top_k);
  out.method.norm = norm;
  return out;
}

CandidateList as_candidate_list(const FusedList& fused) {
  CandidateList out;
  for (std::size_t i = 0; i < fused.source_models.size(); ++i) {
    if (i > 0) out.model_id += "+";
    out.model_id += fused.source_models[i];
  }
  out.params = fused.params;
  out.items = fused.items;
  return out;
}

CandidateFileInfo file_info(const FusedList& fused) {
  return CandidateFileInfo{fused.method.name(), fused.source_models};
}

}  // namespace clonefuse
