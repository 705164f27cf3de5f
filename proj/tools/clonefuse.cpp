// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Every subcommand prints machine-readable JSON
// first, then a human summary; exit status is 0 on success, 2 otherwise.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "clonefuse/annindex.hpp"
#include "clonefuse/candidate_io.hpp"
#include "clonefuse/corpus.hpp"
#include "clonefuse/embed.hpp"
#include "clonefuse/error.hpp"
#include "clonefuse/evalkit.hpp"
#include "clonefuse/fusion.hpp"
#include "clonefuse/pipeline.hpp"
#include "clonefuse/report.hpp"
#include "clonefuse/review.hpp"
#include "clonefuse/statlab.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace clonefuse;

namespace {

constexpr int kFailure = 2;
constexpr const char* kEndpointEnv = "CLONEFUSE_EMBED_ENDPOINT";

struct Globals {
  unsigned threads = 1;
};

// --------------------------------------------------------------- extract

struct ExtractArgs {
  std::string lang = "c";
  int minloc = 0;
  std::string label = "corpus";
  std::string out;
  std::vector<std::string> paths;
};

std::string loc_histogram(const std::vector<FunctionUnit>& units) {
  const std::vector<std::pair<int, std::string>> buckets{{10, "1-9"}, {50, "10-49"}, {100, "50-99"},
                                                         {500, "100-499"}, {INT32_MAX, "500+"}};
  std::vector<std::size_t> counts(buckets.size(), 0);
  for (const auto& u : units) {
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      if (u.loc() < buckets[b].first) {
        ++counts[b];
        break;
      }
    }
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t b = 0; b < buckets.size(); ++b) rows.push_back({buckets[b].second, std::to_string(counts[b])});
  return format_table({"loc", "units"}, rows);
}

int run_extract(const ExtractArgs& a) {
  std::vector<fs::path> paths(a.paths.begin(), a.paths.end());
  const auto build = build_corpus(paths, parse_language(a.lang), a.minloc, a.label);
  for (const auto& w : build.warnings) std::cerr << "warning: " << w << "\n";
  if (!a.out.empty()) store_manifest(build.manifest, a.out);
  const auto& units = build.manifest.units;
  std::cout << json{{"units", units.size()}, {"warnings", build.warnings.size()}, {"out", a.out}}.dump() << "\n";
  std::cout << units.size() << " units\n" << loc_histogram(units);
  return 0;
}

// ----------------------------------------------------------------- embed

struct EmbedArgs {
  std::string manifest;
  std::string backend = "mock";
  std::string model;
  int dimension = 256;
  int code_length = 128;
  std::uint64_t seed = 0;
  std::string endpoint;
  int batch_size = 32;
  int max_in_flight = 4;
  bool text = false;
  std::string out;
};

EmbedderSpec spec_from(const EmbedArgs& a, unsigned threads) {
  EmbedderSpec spec;
  spec.backend = parse_embed_backend(a.backend);
  spec.model_id = a.model;
  spec.dimension = a.dimension;
  spec.code_length = a.code_length;
  spec.seed = a.seed;
  spec.endpoint = a.endpoint;
  if (spec.endpoint.empty() && spec.backend == EmbedBackend::kRemote) {
    if (const char* env = std::getenv(kEndpointEnv)) spec.endpoint = env;
  }
  spec.batch_size = a.batch_size;
  spec.max_in_flight = a.max_in_flight;
  spec.threads = threads;
  return spec;
}

int run_embed(const EmbedArgs& a, const Globals& g) {
  const auto manifest = load_manifest(a.manifest);
  const auto spec = spec_from(a, g.threads);
  const auto records = embed(manifest.units, spec);
  store_vectors(a.out, records, spec.backend == EmbedBackend::kMock, a.text ? VectorEncoding::kText : VectorEncoding::kBinary);
  std::cout << json{{"model_id", spec.model_id}, {"vectors", records.size()}, {"dimension", spec.dimension},
                    {"out", a.out}}
                   .dump()
            << "\n";
  std::cout << "embedded " << records.size() << " units with " << spec.model_id << "\n";
  return 0;
}

// ---------------------------------------------------------------- search

struct SearchArgs {
  std::string manifest;
  std::string vectors;
  std::string against_manifest;
  std::string against_vectors;
  int top_n = 10;
  double threshold = 0.0;
  std::vector<std::size_t> top_k{1000};
  std::string backend = "exact";
  HnswParams hnsw;
  bool force = false;
  std::string out;
};

fs::path cutoff_path(const fs::path& out, std::size_t k) {
  auto stem = out.stem().string();
  return out.parent_path() / (stem + ".k" + std::to_string(k) + out.extension().string());
}

int run_search(const SearchArgs& a, const Globals& g) {
  auto cutoffs = a.top_k;
  std::sort(cutoffs.begin(), cutoffs.end());
  cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());
  SearchParams params;
  params.top_n_class = a.top_n;
  params.similarity_threshold = a.threshold;
  params.global_top_k = cutoffs.back();
  params.backend = parse_index_backend(a.backend);
  validate(params);

  const auto manifest = load_manifest(a.manifest);
  UnitCatalog catalog = make_catalog(manifest.units);
  const auto loaded = load_vectors(a.vectors);
  const bool cross = !a.against_manifest.empty() || !a.against_vectors.empty();
  if (cross && (a.against_manifest.empty() || a.against_vectors.empty())) {
    throw Error(ErrorCode::kInvalidArgument, "--against needs both a manifest and a vector store");
  }

  std::vector<EmbeddingRecord> indexed = loaded.records;
  if (cross) {
    const auto other = load_manifest(a.against_manifest);
    for (const auto& [id, key] : make_catalog(other.units)) catalog.emplace(id, key);
    indexed = load_vectors(a.against_vectors).records;
  }

  if (params.backend == IndexBackend::kApproximate) {
    const auto gate = approximate_gate(indexed, catalog, params, a.hnsw, g.threads);
    if (!gate.passed) {
      std::cerr << "warning: approximate backend recall@10 below 0.95 (list " << format_score(gate.list_recall)
                << ", knn " << format_score(gate.knn_recall) << ")\n";
      if (!a.force) {
        std::cerr << "refusing to write results; raise --ef-search/--hnsw-m or pass --force\n";
        return kFailure;
      }
    }
  }

  const auto index = build_index(indexed, params.backend, a.hnsw);
  const auto list = cross ? batch_search(index, loaded.records, catalog, params, g.threads)
                          : self_search(index, catalog, params, g.threads);
  std::vector<std::string> files;
  write_candidates(a.out, list);
  files.push_back(a.out);
  if (cutoffs.size() > 1) {
    for (const auto& cut : truncations(list, cutoffs)) {
      const auto path = cutoff_path(a.out, cut.params.global_top_k);
      write_candidates(path, cut);
      files.push_back(path.string());
    }
  }
  std::cout << json{{"model_id", list.model_id}, {"candidates", list.items.size()}, {"files", files}}.dump() << "\n";
  std::cout << list.items.size() << " candidates (" << (cross ? "cross-corpus" : "self") << " search, "
            << to_string(params.backend) << ")\n";
  return 0;
}

// ------------------------------------------------------------------ fuse

struct FuseArgs {
  std::string norm = "non-norm";
  std::string agg = "average";
  int rrf_k = 60;
  std::size_t top_k = 1000;
  std::string out;
  std::vector<std::string> inputs;
};

int run_fuse(const FuseArgs& a) {
  if (a.inputs.size() < 2) {
    throw Error(ErrorCode::kTooFewLists, "fuse needs at least 2 input lists, got " + std::to_string(a.inputs.size()));
  }
  const auto method = parse_ensemble_method(a.norm + "_" + a.agg, a.rrf_k);
  std::vector<CandidateList> lists;
  for (const auto& in : a.inputs) lists.push_back(normalize(read_candidates(in), method.norm));
  auto fused = fuse(lists, method.agg, a.top_k);
  fused.method = method;
  write_candidates(a.out, as_candidate_list(fused), file_info(fused));
  std::cout << json{{"method", method.name()}, {"sources", fused.source_models}, {"candidates", fused.items.size()},
                    {"out", a.out}}
                   .dump()
            << "\n";
  std::cout << method.name() << ": " << fused.items.size() << " fused candidates\n";
  return 0;
}

// ------------------------------------------------------------------ eval

struct EvalArgs {
  std::vector<std::string> candidates;
  std::string truth;
  std::vector<std::size_t> cutoffs;
  std::string match = "exact";
  std::optional<std::size_t> cutoff;
  std::string labels;
  std::optional<std::size_t> tp;
  std::optional<std::size_t> total;
};

std::string label_of(const std::string& path) {
  CandidateFileInfo info;
  const auto list = read_candidates(path, &info);
  return info.method ? list.model_id + ":" + *info.method : list.model_id;
}

int run_eval_recall(const EvalArgs& a) {
  const auto gt = load_ground_truth(a.truth);
  const auto mode = parse_match_mode(a.match);
  std::vector<std::pair<std::string, RecallReport>> rows;
  for (const auto& path : a.candidates) {
    const auto list = read_candidates(path);
    auto report = recall_at(list, gt, a.cutoffs, mode);
    std::cout << recall_json(label_of(path), report) << "\n";
    rows.emplace_back(label_of(path), std::move(report));
  }
  std::cout << render_recall_table(rows);
  return 0;
}

int run_eval_typed(const EvalArgs& a) {
  const auto gt = load_ground_truth(a.truth);
  const auto mode = parse_match_mode(a.match);
  std::vector<std::pair<std::string, TypedRecall>> rows;
  for (const auto& path : a.candidates) {
    auto report = typed_recall(read_candidates(path), gt, mode, a.cutoff);
    std::cout << typed_json(label_of(path), report) << "\n";
    rows.emplace_back(label_of(path), std::move(report));
  }
  std::cout << render_typed_table(rows);
  return 0;
}

int run_eval_precision(const EvalArgs& a) {
  std::size_t tp = 0;
  std::size_t total = 0;
  if (!a.labels.empty()) {
    for (const auto& r : load_labels(a.labels)) {
      if (r.judgment == ReviewJudgment::kSkip) continue;
      ++total;
      if (r.judgment == ReviewJudgment::kTruePositive) ++tp;
    }
  } else if (a.tp && a.total) {
    tp = *a.tp;
    total = *a.total;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "give --labels or both --tp and --total");
  }
  const double p = precision(tp, total);
  std::cout << json{{"true_positives", tp}, {"inspected", total}, {"precision", p}}.dump() << "\n";
  std::cout << "precision " << fixed2(p) << "% (" << tp << " of " << total << ")\n";
  return 0;
}

// ------------------------------------------------------------------ rank

int run_rank_borda(const std::string& input) {
  std::ifstream in(input);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + input);
  std::vector<std::string> datasets;
  std::map<std::string, std::map<std::string, double>> averages;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      const auto dataset = j.at("dataset").get<std::string>();
      if (averages.find(dataset) == averages.end()) datasets.push_back(dataset);
      averages[dataset][j.at("model").get<std::string>()] = j.at("average").get<double>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormatViolation, input + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  std::map<std::string, std::map<std::string, int>> ranks;
  for (const auto& d : datasets) ranks[d] = dense_rank(averages[d]);
  const auto table = borda(datasets, ranks);
  std::cout << borda_json(table) << "\n" << render_borda_table(table);
  return 0;
}

// ----------------------------------------------------------------- stats

struct StatsArgs {
  std::string data;
  bool raw = false;
  bool population = false;
  double alpha = 0.05;
  int label_columns = 2;
};

json t_json(const TTestResult& t) {
  return {{"test", "paired-t"}, {"n", t.n}, {"mean_a", t.mean_a}, {"mean_b", t.mean_b},
          {"mean_diff", t.mean_diff}, {"statistic", t.t}, {"df", t.df}, {"p", t.p}};
}

json w_json(const WilcoxonResult& w) {
  return {{"test", "wilcoxon"}, {"n", w.n}, {"zeros", w.zeros}, {"mean_diff", w.mean_diff},
          {"w_plus", w.w_plus}, {"statistic", w.statistic}, {"z", w.z}, {"p", w.p}};
}

int run_stats_ols(const StatsArgs& a) {
  const auto data = load_regression_csv(a.data, a.label_columns);
  const auto fit = ols_fit(data, !a.raw, a.population ? SigmaConvention::kPopulation : SigmaConvention::kSample);
  json coefs = json::array();
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    coefs.push_back({{"name", fit.names[i]}, {"coef", fit.coefficients[k]}, {"std_err", fit.std_errors[k]},
                     {"t", fit.t_values[k]}, {"p", fit.p_values[k]}});
    char buf[4][32];
    std::snprintf(buf[0], 32, "%.4f", fit.coefficients[k]);
    std::snprintf(buf[1], 32, "%.4f", fit.std_errors[k]);
    std::snprintf(buf[2], 32, "%.3f", fit.t_values[k]);
    std::snprintf(buf[3], 32, "%.4f", fit.p_values[k]);
    rows.push_back({fit.names[i], buf[0], buf[1], buf[2], buf[3]});
  }
  json hyps = json::array();
  for (const auto& h : hypothesis_report(fit, a.alpha)) {
    hyps.push_back({{"hypothesis", h.hypothesis}, {"feature", h.feature}, {"coef", h.coefficient},
                    {"p", h.p_value}, {"rejected", h.rejected}});
  }
  std::cout << json{{"n", data.y.size()},
                    {"r_squared", fit.r_squared},
                    {"adj_r_squared", fit.adj_r_squared},
                    {"f_statistic", fit.f_statistic},
                    {"f_p_value", fit.f_p_value},
                    {"condition_number", fit.condition_number},
                    {"coefficients", coefs},
                    {"hypotheses", hyps}}
                   .dump()
            << "\n";
  char head[160];
  std::snprintf(head, sizeof(head), "R2 %.3f  adj R2 %.3f  F %.3f (p %.4f)  cond %.2f\n", fit.r_squared,
                fit.adj_r_squared, fit.f_statistic, fit.f_p_value, fit.condition_number);
  std::cout << head << format_table({"term", "coef", "std err", "t", "p"}, rows);
  for (const auto& h : hypothesis_report(fit, a.alpha)) {
    std::cout << h.hypothesis << " " << h.feature << ": " << (h.rejected ? "rejected" : "accepted") << " (p "
              << fixed2(h.p_value * 100.0) << "%)\n";
  }
  return 0;
}

int run_stats_paired(const StatsArgs& a, const std::string& which) {
  const auto sample = load_paired_csv(a.data);
  json record;
  if (which == "ttest") {
    record = t_json(paired_t_test(sample));
  } else if (which == "wilcoxon") {
    record = w_json(wilcoxon_signed_rank(sample));
  } else if (which == "normality") {
    const auto n = shapiro_wilk(sample.a - sample.b);
    record = {{"test", "shapiro-wilk"}, {"n", sample.a.size()}, {"statistic", n.w}, {"p", n.p}};
  } else {
    const auto r = route_paired_test(sample, a.alpha);
    record = r.chosen == PairedTest::kPairedT ? t_json(r.t_test) : w_json(r.wilcoxon);
    record["normality_w"] = r.normality.w;
    record["normality_p"] = r.normality.p;
  }
  record["name"] = sample.name;
  std::cout << record.dump() << "\n";
  char line[200];
  std::snprintf(line, sizeof(line), "%s: %s statistic %.4f p %.3g\n", sample.name.c_str(),
                record["test"].get<std::string>().c_str(), record["statistic"].get<double>(),
                record["p"].get<double>());
  std::cout << line;
  return 0;
}

// ---------------------------------------------------------------- review

struct ReviewArgs {
  std::string in;
  std::string out;
  double floor = 0.2;
  std::size_t grace = 10;
  std::optional<std::size_t> budget;
  std::string root = ".";
};

int run_review_cmd(const ReviewArgs& a) {
  const auto list = read_candidates(a.in);
  ReviewOptions options{a.floor, a.grace, a.budget};
  const auto s = run_review(list, a.out, options, std::cin, std::cerr, file_snippets(a.root), utc_timestamp);
  std::cout << json{{"true_positives", s.true_positives}, {"judged", s.judged}, {"skipped", s.skipped},
                    {"duplicates", s.duplicates}, {"precision", s.precision},
                    {"stopped_by_floor", s.stopped_by_floor}, {"exhausted", s.exhausted}}
                   .dump()
            << "\n";
  std::cout << s.true_positives << " true positives of " << s.judged << " judged, precision "
            << fixed2(s.precision) << "%\n";
  return 0;
}

// ------------------------------------------------------------------- run

struct RunArgs {
  std::vector<std::string> corpus;
  std::string lang = "c";
  int minloc = 0;
  std::vector<std::string> embedders{"mock:mock-a", "mock:mock-b"};
  std::uint64_t seed = 1;
  int dimension = 256;
  int code_length = 128;
  int top_n = 10;
  double threshold = 0.0;
  std::size_t top_k = 1000;
  std::string backend = "exact";
  HnswParams hnsw;
  bool force = false;
  std::vector<std::string> methods;
  int rrf_k = 60;
  std::vector<std::size_t> cutoffs;
  std::string truth;
  std::string match = "exact";
  std::string out_dir;
};

// "<backend>:<model_id>[:<endpoint or store path>]"
EmbedderSpec parse_embedder(const std::string& text, const RunArgs& a, unsigned threads) {
  const auto first = text.find(':');
  if (first == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "embedder must be backend:model[:endpoint]");
  EmbedderSpec spec;
  spec.backend = parse_embed_backend(text.substr(0, first));
  const auto second = text.find(':', first + 1);
  spec.model_id = text.substr(first + 1, second == std::string::npos ? std::string::npos : second - first - 1);
  if (second != std::string::npos) spec.endpoint = text.substr(second + 1);
  if (spec.endpoint.empty() && spec.backend == EmbedBackend::kRemote) {
    if (const char* env = std::getenv(kEndpointEnv)) spec.endpoint = env;
  }
  spec.dimension = a.dimension;
  spec.code_length = a.code_length;
  spec.threads = threads;
  return spec;
}

int run_run(const RunArgs& a, const Globals& g) {
  RunConfig config;
  config.corpus_paths.assign(a.corpus.begin(), a.corpus.end());
  config.language = parse_language(a.lang);
  config.minloc = a.minloc;
  for (const auto& e : a.embedders) config.embedders.push_back(parse_embedder(e, a, g.threads));
  config.seed = a.seed;
  config.search.top_n_class = a.top_n;
  config.search.similarity_threshold = a.threshold;
  config.search.global_top_k = a.top_k;
  config.search.backend = parse_index_backend(a.backend);
  config.hnsw = a.hnsw;
  config.force = a.force;
  if (!a.methods.empty()) {
    config.methods.clear();
    for (const auto& m : a.methods) config.methods.push_back(parse_ensemble_method(m, a.rrf_k));
  } else {
    config.methods = all_ensemble_methods(a.rrf_k);
  }
  config.cutoffs = a.cutoffs;
  if (!a.truth.empty()) config.ground_truth = a.truth;
  config.match = parse_match_mode(a.match);
  config.out_dir = a.out_dir;
  config.threads = g.threads;

  const auto result = run_pipeline(config);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  json files = json::array();
  for (const auto& f : result.files) files.push_back(f.generic_string());
  std::cout << json{{"files", files}, {"warnings", result.warnings.size()}}.dump() << "\n";
  std::cout << result.files.size() << " files written to " << a.out_dir << "\n";
  if (!result.outcomes.empty()) {
    std::vector<std::pair<std::string, RecallReport>> rows;
    for (const auto& o : result.outcomes) rows.emplace_back(o.label, o.recall);
    std::cout << render_recall_table(rows);
  }
  return 0;
}

void add_hnsw_options(CLI::App* cmd, HnswParams& hnsw) {
  cmd->add_option("--hnsw-m", hnsw.m, "graph degree of the approximate backend")->capture_default_str();
  cmd->add_option("--ef-construction", hnsw.ef_construction, "build beam width")->capture_default_str();
  cmd->add_option("--ef-search", hnsw.ef_search, "query beam width")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clonefuse: embedding-based clone detection with late fusion"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file of option values; command-line flags win");
  Globals g;
  app.add_option("--threads", g.threads, "worker threads")->capture_default_str()->check(CLI::Range(1u, 1024u));

  std::function<int()> action;

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "extract function units into a corpus manifest");
  extract->add_option("--lang", ex.lang, "c, cpp or java")->capture_default_str();
  extract->add_option("--minloc", ex.minloc, "drop units shorter than this many lines")->capture_default_str();
  extract->add_option("--label", ex.label, "corpus label")->capture_default_str();
  extract->add_option("--out", ex.out, "manifest output path");
  extract->add_option("paths", ex.paths, "source files or directories")->required();
  extract->callback([&] { action = [&] { return run_extract(ex); }; });

  EmbedArgs em;
  auto* embed_cmd = app.add_subcommand("embed", "embed the units of a manifest");
  embed_cmd->add_option("--manifest", em.manifest)->required();
  embed_cmd->add_option("--backend", em.backend, "mock, remote or file")->capture_default_str();
  embed_cmd->add_option("--model", em.model, "model id")->required();
  embed_cmd->add_option("--dim", em.dimension)->capture_default_str();
  embed_cmd->add_option("--code-length", em.code_length)->capture_default_str();
  embed_cmd->add_option("--seed", em.seed)->capture_default_str();
  embed_cmd->add_option("--endpoint", em.endpoint,
                        std::string("sidecar URL (remote, default $") + kEndpointEnv + ") or vector store (file)");
  embed_cmd->add_option("--batch-size", em.batch_size)->capture_default_str();
  embed_cmd->add_option("--max-in-flight", em.max_in_flight)->capture_default_str();
  embed_cmd->add_flag("--text", em.text, "write the JSON-lines encoding");
  embed_cmd->add_option("--out", em.out, "vector store output path")->required();
  embed_cmd->callback([&] { action = [&] { return run_embed(em, g); }; });

  SearchArgs se;
  auto* search = app.add_subcommand("search", "rank clone candidates");
  search->add_option("--manifest", se.manifest)->required();
  search->add_option("--vectors", se.vectors)->required();
  search->add_option("--against", se.against_manifest, "manifest of the corpus to search (cross-corpus mode)");
  search->add_option("--against-vectors", se.against_vectors, "vector store of the --against corpus");
  search->add_option("--top-n", se.top_n, "clone class size")->capture_default_str();
  search->add_option("--threshold", se.threshold, "minimum cosine similarity")->capture_default_str();
  search->add_option("--top-k", se.top_k, "global cutoffs, comma separated")->delimiter(',')->allow_extra_args(false)->capture_default_str();
  search->add_option("--backend", se.backend, "exact or approximate")->capture_default_str();
  add_hnsw_options(search, se.hnsw);
  search->add_flag("--force", se.force, "write approximate results even when the recall gate fails");
  search->add_option("--out", se.out, "candidate list output path")->required();
  search->callback([&] { action = [&] { return run_search(se, g); }; });

  FuseArgs fu;
  auto* fuse_cmd = app.add_subcommand("fuse", "ensemble candidate lists");
  fuse_cmd->add_option("--norm", fu.norm, "non-norm, min-max, z-score or rrf")->capture_default_str();
  fuse_cmd->add_option("--agg", fu.agg, "average, sum or max")->capture_default_str();
  fuse_cmd->add_option("--rrf-k", fu.rrf_k)->capture_default_str();
  fuse_cmd->add_option("--top-k", fu.top_k, "global cutoff of the fused list")->capture_default_str();
  fuse_cmd->add_option("--out", fu.out)->required();
  fuse_cmd->add_option("inputs", fu.inputs, "candidate list files");
  fuse_cmd->callback([&] { action = [&] { return run_fuse(fu); }; });

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "score candidate lists");
  eval->require_subcommand(1);
  auto* recall = eval->add_subcommand("recall", "recall at global cutoffs");
  recall->add_option("--truth", ev.truth)->required();
  recall->add_option("--cutoffs", ev.cutoffs)->delimiter(',')->allow_extra_args(false)->required();
  recall->add_option("--match", ev.match, "exact, overlap or overlap:<theta>")->capture_default_str();
  recall->add_option("candidates", ev.candidates)->required();
  recall->callback([&] { action = [&] { return run_eval_recall(ev); }; });
  auto* typed = eval->add_subcommand("typed", "recall per clone type");
  typed->add_option("--truth", ev.truth)->required();
  typed->add_option("--cutoff", ev.cutoff, "only the first N candidates");
  typed->add_option("--match", ev.match)->capture_default_str();
  typed->add_option("candidates", ev.candidates)->required();
  typed->callback([&] { action = [&] { return run_eval_typed(ev); }; });
  auto* prec = eval->add_subcommand("precision", "precision of labelled candidates");
  prec->add_option("--labels", ev.labels, "labels file written by review");
  prec->add_option("--tp", ev.tp);
  prec->add_option("--total", ev.total);
  prec->callback([&] { action = [&] { return run_eval_precision(ev); }; });

  std::string borda_input;
  auto* rank = app.add_subcommand("rank", "cross-dataset model ranking");
  rank->require_subcommand(1);
  auto* borda_cmd = rank->add_subcommand("borda", "dense ranks per dataset, Borda totals");
  borda_cmd->add_option("input", borda_input, "JSON lines {dataset, model, average}")->required();
  borda_cmd->callback([&] { action = [&] { return run_rank_borda(borda_input); }; });

  StatsArgs st;
  auto* stats = app.add_subcommand("stats", "regression and paired significance tests");
  stats->require_subcommand(1);
  auto* ols = stats->add_subcommand("ols", "least squares on a regression CSV");
  ols->add_option("data", st.data)->required();
  ols->add_flag("--raw", st.raw, "do not standardise features");
  ols->add_flag("--population-sigma", st.population, "standardise with the population deviation");
  ols->add_option("--alpha", st.alpha)->capture_default_str();
  ols->add_option("--label-columns", st.label_columns)->capture_default_str();
  ols->callback([&] { action = [&] { return run_stats_ols(st); }; });
  for (const char* name : {"ttest", "wilcoxon", "route", "normality"}) {
    auto* cmd = stats->add_subcommand(name, std::string(name) + " on a paired CSV (label,a,b)");
    cmd->add_option("data", st.data)->required();
    if (std::string(name) == "route") cmd->add_option("--alpha", st.alpha, "normality level")->capture_default_str();
    cmd->callback([&, name] { action = [&, name] { return run_stats_paired(st, name); }; });
  }

  ReviewArgs rv;
  auto* review = app.add_subcommand("review", "label candidates interactively");
  review->add_option("--in", rv.in)->required();
  review->add_option("--out", rv.out, "labels file (appended, resumable)")->required();
  review->add_option("--floor", rv.floor)->capture_default_str();
  review->add_option("--grace", rv.grace)->capture_default_str();
  review->add_option("--budget", rv.budget, "stop after this many judgments");
  review->add_option("--root", rv.root, "directory the candidate paths are relative to")->capture_default_str();
  review->callback([&] { action = [&] { return run_review_cmd(rv); }; });

  RunArgs ru;
  auto* run = app.add_subcommand("run", "extract, embed, search, fuse and evaluate in one pass");
  run->add_option("--corpus", ru.corpus)->required();
  run->add_option("--lang", ru.lang)->capture_default_str();
  run->add_option("--minloc", ru.minloc)->capture_default_str();
  run->add_option("--embedder", ru.embedders, "backend:model[:endpoint], repeatable")->capture_default_str();
  run->add_option("--seed", ru.seed, "mock embedder i uses seed + i")->capture_default_str();
  run->add_option("--dim", ru.dimension)->capture_default_str();
  run->add_option("--code-length", ru.code_length)->capture_default_str();
  run->add_option("--top-n", ru.top_n)->capture_default_str();
  run->add_option("--threshold", ru.threshold)->capture_default_str();
  run->add_option("--top-k", ru.top_k)->capture_default_str();
  run->add_option("--backend", ru.backend)->capture_default_str();
  add_hnsw_options(run, ru.hnsw);
  run->add_flag("--force", ru.force);
  run->add_option("--methods", ru.methods, "ensembling methods (default all 12)")->delimiter(',')->allow_extra_args(false);
  run->add_option("--rrf-k", ru.rrf_k)->capture_default_str();
  run->add_option("--cutoffs", ru.cutoffs)->delimiter(',')->allow_extra_args(false);
  run->add_option("--truth", ru.truth);
  run->add_option("--match", ru.match)->capture_default_str();
  run->add_option("--out-dir", ru.out_dir)->required();
  run->callback([&] { action = [&] { return run_run(ru, g); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kFailure;
  }
  try {
    return action ? action() : kFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kFailure;
}
