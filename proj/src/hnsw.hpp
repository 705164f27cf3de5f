// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "clonefuse/annindex.hpp"

namespace clonefuse {

/// Hierarchical navigable small-world graph over the rows of a normalised
/// matrix, maximising dot-product similarity. Insertion is sequential and
/// seeded, so the graph is a pure function of (rows, params).
class HnswGraph {
 public:
  HnswGraph(const RowMatrix& data, const HnswParams& params);

  /// Up to k (similarity, row) results, best first, `exclude` omitted.
  std::vector<std::pair<double, std::size_t>> search(const RowMatrix& data, const double* query,
                                                     int k, int ef,
                                                     std::optional<std::size_t> exclude) const;

 private:
  using Scored = std::pair<double, std::uint32_t>;  // (similarity, node)

  std::vector<Scored> search_layer(const RowMatrix& data, const double* query,
                                   const std::vector<Scored>& entry, int ef, int layer) const;
  std::vector<std::uint32_t> select_neighbors(const RowMatrix& data, std::vector<Scored> candidates,
                                              std::size_t limit) const;
  void insert(const RowMatrix& data, std::uint32_t node, int level);

  std::size_t max_links(int layer) const { return layer == 0 ? 2 * m_ : m_; }

  std::size_t m_;
  int ef_construction_;
  std::vector<int> levels_;
  std::vector<std::vector<std::vector<std::uint32_t>>> links_;  // [node][layer]
  std::int64_t entry_ = -1;
  int top_level_ = -1;
};

}  // namespace clonefuse
