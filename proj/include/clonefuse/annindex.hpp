// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "clonefuse/corpus.hpp"
#include "clonefuse/embed.hpp"

namespace clonefuse {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class IndexBackend { kExact, kApproximate };

std::string_view to_string(IndexBackend backend);
IndexBackend parse_index_backend(std::string_view name);

/// Graph parameters of the approximate (hierarchical small-world) backend.
struct HnswParams {
  int m = 24;
  int ef_construction = 200;
  int ef_search = 256;
  std::uint64_t seed = 0x5eed;
};

/// Clone-class search semantics. Only the cosine metric is supported.
struct SearchParams {
  int top_n_class = 10;
  double similarity_threshold = 0.0;
  std::size_t global_top_k = 1000;
  IndexBackend backend = IndexBackend::kExact;

  bool operator==(const SearchParams&) const = default;
};

void validate(const SearchParams& params);

/// Unordered function pair in canonical orientation (first < second).
struct PairKey {
  FunctionKey first;
  FunctionKey second;

  auto operator<=>(const PairKey&) const = default;
  bool operator==(const PairKey&) const = default;
};

PairKey canonical_pair(const FunctionKey& x, const FunctionKey& y);

struct PairKeyHash {
  std::size_t operator()(const PairKey& key) const noexcept;
};

/// One clone candidate. Self-search candidates are stored canonically
/// (a < b); cross-corpus candidates keep (query, corpus) orientation.
struct Candidate {
  FunctionKey a;
  FunctionKey b;
  double score = 0.0;

  PairKey key() const { return canonical_pair(a, b); }
  bool operator==(const Candidate&) const = default;
};

/// Score descending, then canonical pair key ascending.
bool ranks_before(const Candidate& x, const Candidate& y);

struct CandidateList {
  std::string model_id;
  SearchParams params;
  std::vector<Candidate> items;

  bool operator==(const CandidateList&) const = default;
};

/// Checks the list invariants (sorted, unique pairs, size and threshold bounds).
void validate(const CandidateList& list);

struct Neighbor {
  std::string unit_id;
  double score = 0.0;

  bool operator==(const Neighbor&) const = default;
};

class HnswGraph;

/// Cosine index over one model's vectors. Rows are L2-normalised at
/// insertion, so similarity is a dot product.
class VectorIndex {
 public:
  VectorIndex();
  ~VectorIndex();
  VectorIndex(VectorIndex&&) noexcept;
  VectorIndex& operator=(VectorIndex&&) noexcept;

  const std::string& model_id() const { return model_id_; }
  int dimension() const { return static_cast<int>(vectors_.cols()); }
  std::size_t size() const { return ids_.size(); }
  IndexBackend backend() const { return backend_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const RowMatrix& vectors() const { return vectors_; }
  std::optional<std::size_t> row_of(const std::string& unit_id) const;

  /// Row-level neighbour query: (score, row) pairs sorted by score
  /// descending then unit id ascending, `exclude` omitted.
  std::vector<std::pair<double, std::size_t>> query_rows(const Eigen::VectorXd& unit_query,
                                                         int k,
                                                         std::optional<std::size_t> exclude) const;

  /// Rank of each row's unit id in ascending id order (tie-break key).
  const std::vector<std::uint32_t>& id_rank() const { return id_rank_; }
  const HnswParams& hnsw_params() const { return hnsw_params_; }
  const HnswGraph* graph() const { return graph_.get(); }

 private:
  friend VectorIndex build_index(const std::vector<EmbeddingRecord>&, IndexBackend,
                                 const HnswParams&);

  std::string model_id_;
  IndexBackend backend_ = IndexBackend::kExact;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> rows_;
  std::vector<std::uint32_t> id_rank_;
  RowMatrix vectors_;
  HnswParams hnsw_params_;
  std::unique_ptr<HnswGraph> graph_;
};

VectorIndex build_index(const std::vector<EmbeddingRecord>& records, IndexBackend backend,
                        const HnswParams& hnsw = {});

/// Neighbours of an indexed unit, self excluded. Throws UnknownUnit.
std::vector<Neighbor> knn(const VectorIndex& index, const std::string& query_unit_id, int k);

/// Clone classes of every unit (top_n_class neighbours at or above the
/// threshold), merged into canonical pairs, globally ranked and truncated.
CandidateList self_search(const VectorIndex& index, const UnitCatalog& catalog,
                          const SearchParams& params, unsigned threads = 1);

/// Clone classes of each query (corpus A) over the indexed corpus B only.
/// Pairs are oriented (A-unit, B-unit).
CandidateList batch_search(const VectorIndex& index, const std::vector<EmbeddingRecord>& queries,
                           const UnitCatalog& catalog, const SearchParams& params,
                           unsigned threads = 1);

/// Fraction of the exact list's top-k pairs that appear in the approximate
/// list's top-k. Throws ParamsMismatch unless the lists differ only in backend.
double ann_recall(const CandidateList& exact, const CandidateList& approx, std::size_t k);

/// Mean per-query overlap of k-nearest-neighbour sets between two indexes
/// over the same records. `max_queries` evenly spaced rows are probed.
double knn_recall(const VectorIndex& exact, const VectorIndex& approx, int k,
                  std::size_t max_queries = 0, unsigned threads = 1);

/// Prefix of a ranked list at each cutoff; params.global_top_k is updated.
std::vector<CandidateList> truncations(const CandidateList& list,
                                       const std::vector<std::size_t>& cutoffs);

}  // namespace clonefuse
