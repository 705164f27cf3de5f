// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "clonefuse/annindex.hpp"
#include "clonefuse/corpus.hpp"
#include "clonefuse/embed.hpp"
#include "clonefuse/evalkit.hpp"
#include "clonefuse/fusion.hpp"

namespace clonefuse {

/// Source files under `paths` (files or directories, searched recursively)
/// whose extension belongs to `language`, sorted by path.
std::vector<std::filesystem::path> collect_sources(const std::vector<std::filesystem::path>& paths,
                                                   Language language);

struct CorpusBuild {
  CorpusManifest manifest;
  std::vector<std::string> warnings;  // "path:line: message"
};

/// Extracts every source file and applies minloc. Unit paths are the
/// generic form of each collected path.
CorpusBuild build_corpus(const std::vector<std::filesystem::path>& paths, Language language, int minloc,
                         const std::string& label);

struct GateResult {
  double list_recall = 0.0;  // ann_recall@10 of the self-search lists
  double knn_recall = 0.0;   // mean per-query recall@10 over sampled queries
  bool passed = false;
};

/// Compares the approximate backend against exact search on the same records.
GateResult approximate_gate(const std::vector<EmbeddingRecord>& records, const UnitCatalog& catalog,
                            const SearchParams& params, const HnswParams& hnsw, unsigned threads,
                            double minimum = 0.95);

struct RunConfig {
  std::vector<std::filesystem::path> corpus_paths;
  Language language = Language::kC;
  int minloc = 0;
  std::string label = "corpus";
  std::vector<EmbedderSpec> embedders;
  std::uint64_t seed = 1;  // mock embedder i uses seed + i
  SearchParams search;
  HnswParams hnsw;
  bool force = false;  // ignore a failing approximate gate
  std::vector<EnsembleMethod> methods = all_ensemble_methods();
  std::vector<std::size_t> cutoffs;
  std::optional<std::filesystem::path> ground_truth;
  MatchMode match;
  std::filesystem::path out_dir;
  unsigned threads = 1;
};

void validate(const RunConfig& config);

struct MethodOutcome {
  std::string label;  // model id or "<m1>+<m2>:<method>"
  RecallReport recall;
};

struct RunResult {
  std::vector<std::filesystem::path> files;  // written, in write order
  std::vector<std::string> warnings;
  std::vector<MethodOutcome> outcomes;  // empty without ground truth
};

/// extract -> embed (every embedder) -> self search -> every ensembling
/// method over each model pair -> evaluation. Output is a pure function of
/// the config (thread count excluded).
RunResult run_pipeline(const RunConfig& config);

}  // namespace clonefuse
