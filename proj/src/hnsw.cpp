// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

namespace clonefuse {

namespace {

double dot(const RowMatrix& data, const double* query, std::uint32_t node) {
  return data.row(node).dot(Eigen::Map<const Eigen::RowVectorXd>(query, data.cols()));
}

struct Closer {  // top() is the most similar
  template <typename T>
  bool operator()(const T& x, const T& y) const {
    return x.first < y.first || (x.first == y.first && x.second > y.second);
  }
};

struct Farther {  // top() is the least similar
  template <typename T>
  bool operator()(const T& x, const T& y) const {
    return x.first > y.first || (x.first == y.first && x.second < y.second);
  }
};

// Per-thread visit marks; a generation counter avoids clearing per query.
class VisitTable {
 public:
  void reset(std::size_t n) {
    if (marks_.size() < n) marks_.assign(n, 0);
    if (++generation_ == 0) {
      std::fill(marks_.begin(), marks_.end(), 0);
      generation_ = 1;
    }
  }
  bool visit(std::uint32_t node) {
    if (marks_[node] == generation_) return false;
    marks_[node] = generation_;
    return true;
  }

 private:
  std::vector<std::uint32_t> marks_;
  std::uint32_t generation_ = 0;
};

thread_local VisitTable visits;

}  // namespace

HnswGraph::HnswGraph(const RowMatrix& data, const HnswParams& params)
    : m_(static_cast<std::size_t>(params.m)), ef_construction_(params.ef_construction) {
  const auto n = static_cast<std::size_t>(data.rows());
  levels_.resize(n);
  links_.resize(n);
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double mult = 1.0 / std::log(static_cast<double>(m_));
  for (std::size_t i = 0; i < n; ++i) {
    const double u = 1.0 - unit(rng);  // (0, 1]
    levels_[i] = static_cast<int>(std::floor(-std::log(u) * mult));
  }
  for (std::size_t i = 0; i < n; ++i) insert(data, static_cast<std::uint32_t>(i), levels_[i]);
}

std::vector<HnswGraph::Scored> HnswGraph::search_layer(const RowMatrix& data, const double* query,
                                                       const std::vector<Scored>& entry, int ef,
                                                       int layer) const {
  visits.reset(levels_.size());
  std::priority_queue<Scored, std::vector<Scored>, Closer> frontier;
  std::priority_queue<Scored, std::vector<Scored>, Farther> best;
  for (const auto& e : entry) {
    if (!visits.visit(e.second)) continue;
    frontier.push(e);
    best.push(e);
  }
  while (static_cast<int>(best.size()) > ef) best.pop();
  while (!frontier.empty()) {
    const Scored current = frontier.top();
    if (static_cast<int>(best.size()) >= ef && current.first < best.top().first) break;
    frontier.pop();
    for (const auto next : links_[current.second][static_cast<std::size_t>(layer)]) {
      if (!visits.visit(next)) continue;
      const double sim = dot(data, query, next);
      if (static_cast<int>(best.size()) < ef || sim > best.top().first) {
        frontier.emplace(sim, next);
        best.emplace(sim, next);
        if (static_cast<int>(best.size()) > ef) best.pop();
      }
    }
  }
  std::vector<Scored> out;
  out.reserve(best.size());
  while (!best.empty()) {
    out.push_back(best.top());
    best.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// Diversity heuristic: keep a candidate only if it is closer to the base
// point than to every neighbour already kept.
std::vector<std::uint32_t> HnswGraph::select_neighbors(const RowMatrix& data,
                                                       std::vector<Scored> candidates,
                                                       std::size_t limit) const {
  std::sort(candidates.begin(), candidates.end(), [](const Scored& x, const Scored& y) {
    return x.first > y.first || (x.first == y.first && x.second < y.second);
  });
  std::vector<std::uint32_t> kept;
  for (const auto& [sim, node] : candidates) {
    if (kept.size() >= limit) break;
    bool diverse = true;
    for (const auto other : kept) {
      if (data.row(node).dot(data.row(other)) > sim) {
        diverse = false;
        break;
      }
    }
    if (diverse) kept.push_back(node);
  }
  return kept;
}

void HnswGraph::insert(const RowMatrix& data, std::uint32_t node, int level) {
  links_[node].resize(static_cast<std::size_t>(level) + 1);
  if (entry_ < 0) {
    entry_ = node;
    top_level_ = level;
    return;
  }
  const double* query = data.row(node).data();
  auto ep = static_cast<std::uint32_t>(entry_);
  std::vector<Scored> entry{{dot(data, query, ep), ep}};
  for (int layer = top_level_; layer > level; --layer) entry = {search_layer(data, query, entry, 1, layer).front()};

  for (int layer = std::min(level, top_level_); layer >= 0; --layer) {
    const auto found = search_layer(data, query, entry, ef_construction_, layer);
    const auto lsz = static_cast<std::size_t>(layer);
    links_[node][lsz] = select_neighbors(data, found, m_);
    for (const auto peer : links_[node][lsz]) {
      auto& peer_links = links_[peer][lsz];
      peer_links.push_back(node);
      if (peer_links.size() > max_links(layer)) {
        std::vector<Scored> pool;
        pool.reserve(peer_links.size());
        for (const auto p : peer_links) pool.emplace_back(data.row(peer).dot(data.row(p)), p);
        peer_links = select_neighbors(data, std::move(pool), max_links(layer));
      }
    }
    entry = found;
  }
  if (level > top_level_) {
    top_level_ = level;
    entry_ = node;
  }
}

std::vector<std::pair<double, std::size_t>> HnswGraph::search(
    const RowMatrix& data, const double* query, int k, int ef,
    std::optional<std::size_t> exclude) const {
  std::vector<std::pair<double, std::size_t>> out;
  if (entry_ < 0) return out;
  auto ep = static_cast<std::uint32_t>(entry_);
  std::vector<Scored> entry{{dot(data, query, ep), ep}};
  for (int layer = top_level_; layer > 0; --layer) entry = {search_layer(data, query, entry, 1, layer).front()};
  const int width = std::max(ef, k + 1);
  for (const auto& [sim, node] : search_layer(data, query, entry, width, 0)) {
    if (exclude && *exclude == node) continue;
    out.emplace_back(sim, node);
    if (static_cast<int>(out.size()) == k) break;
  }
  return out;
}

}  // namespace clonefuse
