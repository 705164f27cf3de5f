// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "clonefuse/annindex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "clonefuse/error.hpp"
#include "clonefuse/parallel.hpp"
#include "hnsw.hpp"

namespace clonefuse {

namespace {

// Query rows per GEMM block. Fixed so results never depend on thread count.
constexpr Eigen::Index kBlockRows = 256;

using Scored = std::pair<double, std::size_t>;

// Keeps the best k of `count` scores, skipping rows for which `skip` holds.
template <typename Skip>
std::vector<Scored> top_k(const double* scores, std::size_t count, std::size_t k,
                          const std::vector<std::uint32_t>& id_rank, Skip skip) {
  std::vector<Scored> all;
  all.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    if (!skip(j)) all.emplace_back(scores[j], j);
  }
  const auto better = [&](const Scored& x, const Scored& y) {
    if (x.first != y.first) return x.first > y.first;
    return id_rank[x.second] < id_rank[y.second];
  };
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), better);
  all.resize(keep);
  return all;
}

const FunctionKey& key_of(const UnitCatalog& catalog, const std::string& unit_id) {
  auto it = catalog.find(unit_id);
  if (it == catalog.end()) {
    throw Error(ErrorCode::kUnknownUnit, "unit " + unit_id + " is not in the catalog");
  }
  return it->second;
}

// Dedup by canonical key keeping the maximum score, rank, truncate.
std::vector<Candidate> finalize(std::vector<Candidate> items, std::size_t global_top_k) {
  std::sort(items.begin(), items.end(), [](const Candidate& x, const Candidate& y) {
    const auto kx = x.key();
    const auto ky = y.key();
    if (kx != ky) return kx < ky;
    return x.score > y.score;
  });
  items.erase(std::unique(items.begin(), items.end(),
                          [](const Candidate& x, const Candidate& y) { return x.key() == y.key(); }),
              items.end());
  std::sort(items.begin(), items.end(), ranks_before);
  if (items.size() > global_top_k) items.resize(global_top_k);
  return items;
}

Eigen::VectorXd unit_vector(const Eigen::VectorXf& v) {
  Eigen::VectorXd d = v.cast<double>();
  return d / d.norm();
}

// Per-row neighbour lists for `queries` (rows already normalised) against the index.
template <typename Exclude>
std::vector<std::vector<Scored>> neighbours(const VectorIndex& index, const RowMatrix& queries,
                                            std::size_t k, unsigned threads, Exclude exclude) {
  const auto n_queries = static_cast<std::size_t>(queries.rows());
  std::vector<std::vector<Scored>> out(n_queries);
  if (index.backend() == IndexBackend::kExact) {
    const auto blocks = static_cast<std::size_t>((queries.rows() + kBlockRows - 1) / kBlockRows);
    parallel_for(blocks, threads, [&](std::size_t b) {
      const Eigen::Index begin = static_cast<Eigen::Index>(b) * kBlockRows;
      const Eigen::Index rows = std::min(kBlockRows, queries.rows() - begin);
      const RowMatrix scores = queries.middleRows(begin, rows) * index.vectors().transpose();
      for (Eigen::Index r = 0; r < rows; ++r) {
        const auto q = static_cast<std::size_t>(begin + r);
        const auto skip_row = exclude(q);
        out[q] = top_k(scores.row(r).data(), index.size(), k, index.id_rank(),
                       [&](std::size_t j) { return skip_row && *skip_row == j; });
      }
    });
  } else {
    parallel_for(n_queries, threads, [&](std::size_t q) {
      out[q] = index.graph()->search(index.vectors(), queries.row(static_cast<Eigen::Index>(q)).data(),
                                     static_cast<int>(k), index.hnsw_params().ef_search, exclude(q));
    });
  }
  return out;
}

}  // namespace

std::string_view to_string(IndexBackend backend) {
  return backend == IndexBackend::kExact ? "exact" : "approximate";
}

IndexBackend parse_index_backend(std::string_view name) {
  if (name == "exact") return IndexBackend::kExact;
  if (name == "approximate") return IndexBackend::kApproximate;
  throw Error(ErrorCode::kInvalidArgument, "unknown index backend '" + std::string(name) + "'");
}

void validate(const SearchParams& params) {
  if (params.top_n_class < 1) throw Error(ErrorCode::kInvalidArgument, "top_n_class must be >= 1");
  if (params.global_top_k < 1) throw Error(ErrorCode::kInvalidArgument, "global_top_k must be >= 1");
  if (!std::isfinite(params.similarity_threshold)) {
    throw Error(ErrorCode::kInvalidArgument, "similarity_threshold must be finite");
  }
}

PairKey canonical_pair(const FunctionKey& x, const FunctionKey& y) {
  return y < x ? PairKey{y, x} : PairKey{x, y};
}

std::size_t PairKeyHash::operator()(const PairKey& key) const noexcept {
  FunctionKeyHash h;
  return h(key.first) * 1000003u ^ h(key.second);
}

bool ranks_before(const Candidate& x, const Candidate& y) {
  if (x.score != y.score) return x.score > y.score;
  return x.key() < y.key();
}

void validate(const CandidateList& list) {
  validate(list.params);
  if (list.items.size() > list.params.global_top_k) {
    throw Error(ErrorCode::kFormatViolation, "candidate list exceeds global_top_k");
  }
  std::set<PairKey> seen;
  for (std::size_t i = 0; i < list.items.size(); ++i) {
    const auto& c = list.items[i];
    if (c.a == c.b) throw Error(ErrorCode::kFormatViolation, "candidate pairs a unit with itself");
    if (!std::isfinite(c.score)) throw Error(ErrorCode::kFormatViolation, "non-finite candidate score");
    if (c.score < list.params.similarity_threshold) {
      throw Error(ErrorCode::kFormatViolation, "candidate score below similarity_threshold");
    }
    if (!seen.insert(c.key()).second) throw Error(ErrorCode::kFormatViolation, "duplicate candidate pair");
    if (i > 0 && ranks_before(c, list.items[i - 1])) {
      throw Error(ErrorCode::kFormatViolation, "candidate list is not ranked");
    }
  }
}

VectorIndex::VectorIndex() = default;
VectorIndex::~VectorIndex() = default;
VectorIndex::VectorIndex(VectorIndex&&) noexcept = default;
VectorIndex& VectorIndex::operator=(VectorIndex&&) noexcept = default;

std::optional<std::size_t> VectorIndex::row_of(const std::string& unit_id) const {
  auto it = rows_.find(unit_id);
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<double, std::size_t>> VectorIndex::query_rows(
    const Eigen::VectorXd& unit_query, int k, std::optional<std::size_t> exclude) const {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (unit_query.size() != vectors_.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "query dimension differs from the index");
  }
  if (backend_ == IndexBackend::kApproximate) {
    return graph_->search(vectors_, unit_query.data(), k, hnsw_params_.ef_search, exclude);
  }
  const Eigen::VectorXd scores = vectors_ * unit_query;
  return top_k(scores.data(), size(), static_cast<std::size_t>(k), id_rank_,
               [&](std::size_t j) { return exclude && *exclude == j; });
}

VectorIndex build_index(const std::vector<EmbeddingRecord>& records, IndexBackend backend,
                        const HnswParams& hnsw) {
  if (records.size() < 2) {
    throw Error(ErrorCode::kTooFewVectors,
                "an index needs at least 2 vectors, got " + std::to_string(records.size()));
  }
  VectorIndex index;
  index.model_id_ = records.front().model_id;
  index.backend_ = backend;
  index.hnsw_params_ = hnsw;
  const auto dim = static_cast<int>(records.front().vector.size());
  index.vectors_.resize(static_cast<Eigen::Index>(records.size()), dim);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.model_id != index.model_id_) {
      throw Error(ErrorCode::kModelMismatch,
                  "index holds one model; got " + index.model_id_ + " and " + rec.model_id);
    }
    validate_record(rec, dim);
    if (!index.rows_.emplace(rec.unit_id, i).second) {
      throw Error(ErrorCode::kDuplicateId, "unit " + rec.unit_id + " indexed twice");
    }
    index.ids_.push_back(rec.unit_id);
    index.vectors_.row(static_cast<Eigen::Index>(i)) = unit_vector(rec.vector).transpose();
  }
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return index.ids_[x] < index.ids_[y]; });
  index.id_rank_.resize(records.size());
  for (std::size_t r = 0; r < order.size(); ++r) index.id_rank_[order[r]] = static_cast<std::uint32_t>(r);

  if (backend == IndexBackend::kApproximate) {
    if (hnsw.m < 2 || hnsw.ef_construction < 1 || hnsw.ef_search < 1) {
      throw Error(ErrorCode::kInvalidArgument, "graph parameters must be positive (m >= 2)");
    }
    index.graph_ = std::make_unique<HnswGraph>(index.vectors_, hnsw);
  }
  return index;
}

std::vector<Neighbor> knn(const VectorIndex& index, const std::string& query_unit_id, int k) {
  const auto row = index.row_of(query_unit_id);
  if (!row) throw Error(ErrorCode::kUnknownUnit, "unit " + query_unit_id + " is not indexed");
  const Eigen::VectorXd q = index.vectors().row(static_cast<Eigen::Index>(*row)).transpose();
  std::vector<Neighbor> out;
  for (const auto& [score, j] : index.query_rows(q, k, row)) out.push_back({index.ids()[j], score});
  return out;
}

CandidateList self_search(const VectorIndex& index, const UnitCatalog& catalog,
                          const SearchParams& params, unsigned threads) {
  validate(params);
  std::vector<const FunctionKey*> keys;
  keys.reserve(index.size());
  for (const auto& id : index.ids()) keys.push_back(&key_of(catalog, id));

  const auto lists = neighbours(index, index.vectors(), static_cast<std::size_t>(params.top_n_class),
                                threads, [](std::size_t q) { return std::optional<std::size_t>(q); });
  std::vector<Candidate> items;
  for (std::size_t q = 0; q < lists.size(); ++q) {
    for (const auto& [score, j] : lists[q]) {
      if (score < params.similarity_threshold || *keys[q] == *keys[j]) continue;
      const auto key = canonical_pair(*keys[q], *keys[j]);
      items.push_back({key.first, key.second, score});
    }
  }
  return CandidateList{index.model_id(), params, finalize(std::move(items), params.global_top_k)};
}

CandidateList batch_search(const VectorIndex& index, const std::vector<EmbeddingRecord>& queries,
                           const UnitCatalog& catalog, const SearchParams& params,
                           unsigned threads) {
  validate(params);
  RowMatrix q(static_cast<Eigen::Index>(queries.size()), index.dimension());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& rec = queries[i];
    if (rec.model_id != index.model_id()) {
      throw Error(ErrorCode::kModelMismatch, "query unit " + rec.unit_id + " was embedded by " +
                                                 rec.model_id + ", index holds " + index.model_id());
    }
    validate_record(rec, index.dimension());
    q.row(static_cast<Eigen::Index>(i)) = unit_vector(rec.vector).transpose();
  }
  // Ids derive from (path, start, end), so an equal id is the same function.
  const auto lists = neighbours(index, q, static_cast<std::size_t>(params.top_n_class), threads,
                                [&](std::size_t i) { return index.row_of(queries[i].unit_id); });
  std::vector<Candidate> items;
  for (std::size_t i = 0; i < lists.size(); ++i) {
    const auto& a = key_of(catalog, queries[i].unit_id);
    for (const auto& [score, j] : lists[i]) {
      if (score < params.similarity_threshold) continue;
      const auto& b = key_of(catalog, index.ids()[j]);
      if (a == b) continue;
      items.push_back({a, b, score});
    }
  }
  return CandidateList{index.model_id(), params, finalize(std::move(items), params.global_top_k)};
}

double ann_recall(const CandidateList& exact, const CandidateList& approx, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  SearchParams lhs = exact.params;
  SearchParams rhs = approx.params;
  lhs.backend = rhs.backend = IndexBackend::kExact;
  if (exact.model_id != approx.model_id || lhs != rhs) {
    throw Error(ErrorCode::kParamsMismatch, "lists differ in model or search parameters");
  }
  const std::size_t want = std::min(k, exact.items.size());
  if (want == 0) return 1.0;
  std::set<PairKey> found;
  for (std::size_t i = 0; i < std::min(k, approx.items.size()); ++i) found.insert(approx.items[i].key());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < want; ++i) hits += found.count(exact.items[i].key());
  return static_cast<double>(hits) / static_cast<double>(want);
}

double knn_recall(const VectorIndex& exact, const VectorIndex& approx, int k,
                  std::size_t max_queries, unsigned threads) {
  if (exact.ids() != approx.ids()) {
    throw Error(ErrorCode::kParamsMismatch, "indexes are over different records");
  }
  const std::size_t n = exact.size();
  const std::size_t probes = max_queries == 0 ? n : std::min(n, max_queries);
  std::vector<double> per(probes, 0.0);
  parallel_for(probes, threads, [&](std::size_t p) {
    const std::size_t row = p * n / probes;
    const Eigen::VectorXd q = exact.vectors().row(static_cast<Eigen::Index>(row)).transpose();
    const auto truth = exact.query_rows(q, k, row);
    const auto got = approx.query_rows(q, k, row);
    std::set<std::size_t> got_rows;
    for (const auto& g : got) got_rows.insert(g.second);
    std::size_t hits = 0;
    for (const auto& t : truth) hits += got_rows.count(t.second);
    per[p] = truth.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(truth.size());
  });
  return std::accumulate(per.begin(), per.end(), 0.0) / static_cast<double>(probes);
}

std::vector<CandidateList> truncations(const CandidateList& list,
                                       const std::vector<std::size_t>& cutoffs) {
  std::vector<CandidateList> out;
  for (const auto cutoff : cutoffs) {
    if (cutoff < 1 || cutoff > list.params.global_top_k) {
      throw Error(ErrorCode::kInvalidArgument, "cutoff " + std::to_string(cutoff) +
                                                   " outside [1, global_top_k]");
    }
    CandidateList cut{list.model_id, list.params, {}};
    cut.params.global_top_k = cutoff;
    const std::size_t keep = std::min(cutoff, list.items.size());
    cut.items.assign(list.items.begin(), list.items.begin() + static_cast<std::ptrdiff_t>(keep));
    out.push_back(std::move(cut));
  }
  return out;
}

}  // namespace clonefuse
