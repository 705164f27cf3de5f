// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "clonefuse/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "clonefuse/candidate_io.hpp"
#include "clonefuse/error.hpp"
#include "clonefuse/report.hpp"
#include "text_util.hpp"

namespace clonefuse {

namespace fs = std::filesystem;

namespace {

const std::set<std::string>& extensions(Language language) {
  static const std::set<std::string> c{".c", ".h"};
  static const std::set<std::string> cpp{".cc", ".cpp", ".cxx", ".c++", ".h", ".hh", ".hpp", ".hxx"};
  static const std::set<std::string> java{".java"};
  switch (language) {
    case Language::kC: return c;
    case Language::kCpp: return cpp;
    case Language::kJava: return java;
    case Language::kOther: break;
  }
  throw Error(ErrorCode::kUnsupportedLanguage, "no source extensions for language 'other'");
}

// Model ids may contain characters that are awkward in file names.
std::string file_stem(const std::string& id) {
  std::string out;
  for (const char ch : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '_';
    out.push_back(ok ? ch : '_');
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace

std::vector<fs::path> collect_sources(const std::vector<fs::path>& paths, Language language) {
  const auto& wanted = extensions(language);
  std::vector<fs::path> out;
  for (const auto& p : paths) {
    if (fs::is_regular_file(p)) {
      out.push_back(p);
    } else if (fs::is_directory(p)) {
      for (const auto& entry : fs::recursive_directory_iterator(p)) {
        if (entry.is_regular_file() && wanted.count(entry.path().extension().string()) != 0) {
          out.push_back(entry.path());
        }
      }
    } else {
      throw Error(ErrorCode::kIoError, "no such file or directory: " + p.string());
    }
  }
  std::sort(out.begin(), out.end(), [](const fs::path& x, const fs::path& y) {
    return x.generic_string() < y.generic_string();
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CorpusBuild build_corpus(const std::vector<fs::path>& paths, Language language, int minloc,
                         const std::string& label) {
  if (minloc < 0) throw Error(ErrorCode::kInvalidArgument, "minloc must be >= 0");
  CorpusBuild build;
  build.manifest.label = label;
  build.manifest.language = language;
  build.manifest.minloc_applied = minloc;
  for (const auto& file : collect_sources(paths, language)) {
    const std::string path = file.generic_string();
    auto result = extract_functions(detail::read_file(file.string()), path, language);
    for (const auto& d : result.diagnostics) {
      build.warnings.push_back(path + ":" + std::to_string(d.line) + ": " + d.message);
    }
    for (auto& u : apply_minloc(result.units, minloc)) build.manifest.units.push_back(std::move(u));
  }
  return build;
}

GateResult approximate_gate(const std::vector<EmbeddingRecord>& records, const UnitCatalog& catalog,
                            const SearchParams& params, const HnswParams& hnsw, unsigned threads,
                            double minimum) {
  constexpr int kGateK = 10;
  constexpr std::size_t kProbes = 1000;
  SearchParams exact_params = params;
  exact_params.backend = IndexBackend::kExact;
  SearchParams approx_params = params;
  approx_params.backend = IndexBackend::kApproximate;
  const auto exact = build_index(records, IndexBackend::kExact);
  const auto approx = build_index(records, IndexBackend::kApproximate, hnsw);
  GateResult gate;
  gate.list_recall = ann_recall(self_search(exact, catalog, exact_params, threads),
                                self_search(approx, catalog, approx_params, threads), kGateK);
  gate.knn_recall = knn_recall(exact, approx, kGateK, kProbes, threads);
  gate.passed = gate.list_recall >= minimum && gate.knn_recall >= minimum;
  return gate;
}

void validate(const RunConfig& config) {
  if (config.corpus_paths.empty()) throw Error(ErrorCode::kInvalidArgument, "no corpus paths");
  for (const auto& p : config.corpus_paths) {
    if (!fs::exists(p)) throw Error(ErrorCode::kIoError, "no such file or directory: " + p.string());
  }
  if (config.embedders.empty()) throw Error(ErrorCode::kInvalidArgument, "no embedders configured");
  std::set<std::string> ids;
  for (const auto& e : config.embedders) {
    validate(e);
    if (!ids.insert(e.model_id).second) {
      throw Error(ErrorCode::kInvalidArgument, "embedder model id " + e.model_id + " used twice");
    }
  }
  validate(config.search);
  for (std::size_t i = 0; i < config.cutoffs.size(); ++i) {
    const auto k = config.cutoffs[i];
    if (k < 1 || k > config.search.global_top_k || (i > 0 && k <= config.cutoffs[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "cutoffs must ascend within [1, global_top_k]");
    }
  }
  if (config.ground_truth && !fs::exists(*config.ground_truth)) {
    throw Error(ErrorCode::kIoError, "no such ground-truth file: " + config.ground_truth->string());
  }
  if (config.ground_truth && config.cutoffs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "evaluation needs at least one cutoff");
  }
  if (config.out_dir.empty()) throw Error(ErrorCode::kInvalidArgument, "no output directory");
}

RunResult run_pipeline(const RunConfig& config) {
  validate(config);
  RunResult result;
  fs::create_directories(config.out_dir / "vectors");
  fs::create_directories(config.out_dir / "candidates");
  fs::create_directories(config.out_dir / "fused");

  auto corpus = build_corpus(config.corpus_paths, config.language, config.minloc, config.label);
  result.warnings = std::move(corpus.warnings);
  const auto& units = corpus.manifest.units;
  const auto manifest_path = config.out_dir / "corpus.jsonl";
  store_manifest(corpus.manifest, manifest_path);
  result.files.push_back(manifest_path);
  const UnitCatalog catalog = make_catalog(units);

  std::optional<GroundTruth> gt;
  if (config.ground_truth) gt = load_ground_truth(*config.ground_truth);

  std::vector<CandidateList> lists;
  for (std::size_t i = 0; i < config.embedders.size(); ++i) {
    EmbedderSpec spec = config.embedders[i];
    spec.threads = config.threads;
    if (spec.backend == EmbedBackend::kMock) spec.seed = config.seed + i;
    const auto records = embed(units, spec);
    const auto stem = file_stem(spec.model_id);
    const auto vectors_path = config.out_dir / "vectors" / (stem + ".cfv");
    store_vectors(vectors_path, records, spec.backend == EmbedBackend::kMock, VectorEncoding::kBinary);
    result.files.push_back(vectors_path);

    if (config.search.backend == IndexBackend::kApproximate && !config.force) {
      const auto gate = approximate_gate(records, catalog, config.search, config.hnsw, config.threads);
      if (!gate.passed) {
        throw Error(ErrorCode::kInvalidArgument,
                    "approximate backend fails the recall gate for " + spec.model_id + " (list " +
                        format_score(gate.list_recall) + ", knn " + format_score(gate.knn_recall) + ")");
      }
    }
    const auto index = build_index(records, config.search.backend, config.hnsw);
    auto list = self_search(index, catalog, config.search, config.threads);
    const auto list_path = config.out_dir / "candidates" / (stem + ".jsonl");
    write_candidates(list_path, list);
    result.files.push_back(list_path);
    lists.push_back(std::move(list));
  }

  std::vector<std::pair<std::string, RecallReport>> table;
  std::string records;
  const auto evaluate = [&](const std::string& label, const CandidateList& list) {
    if (!gt) return;
    auto report = recall_at(list, *gt, config.cutoffs, config.match);
    records += recall_json(label, report) + "\n";
    table.emplace_back(label, report);
    result.outcomes.push_back({label, std::move(report)});
  };
  for (const auto& list : lists) evaluate(list.model_id, list);

  for (std::size_t i = 0; i < lists.size(); ++i) {
    for (std::size_t j = i + 1; j < lists.size(); ++j) {
      const auto pair_dir = config.out_dir / "fused" / (file_stem(lists[i].model_id) + "+" + file_stem(lists[j].model_id));
      fs::create_directories(pair_dir);
      for (const auto& method : config.methods) {
        const auto fused = ensemble(lists[i], lists[j], method.norm, method.agg, config.search.global_top_k);
        const auto view = as_candidate_list(fused);
        const auto fused_path = pair_dir / (method.name() + ".jsonl");
        write_candidates(fused_path, view, file_info(fused));
        result.files.push_back(fused_path);
        evaluate(view.model_id + ":" + method.name(), view);
      }
    }
  }

  if (gt) {
    const auto jsonl = config.out_dir / "report.jsonl";
    write_text(jsonl, records);
    result.files.push_back(jsonl);
    const auto txt = config.out_dir / "report.txt";
    write_text(txt, render_recall_table(table));
    result.files.push_back(txt);
  }
  return result;
}

}  // namespace clonefuse
