// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

// Helpers shared by the unit tests and the acceptance runner: temporary
// directories, a portable seeded generator, random candidate lists and the
// synthetic clone corpus.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "clonefuse/annindex.hpp"
#include "clonefuse/corpus.hpp"
#include "clonefuse/embed.hpp"
#include "clonefuse/error.hpp"
#include "clonefuse/evalkit.hpp"

namespace clonefuse::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(CLONEFUSE_FIXTURE_DIR) / name;
}

// The code of the clonefuse::Error thrown by fn, or nullopt.
template <typename Fn>
std::optional<ErrorCode> code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("clonefuse-test-" + std::to_string(rd()) + "-" + std::to_string(++counter));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// mt19937_64 is fully specified by the standard; the distributions are not,
// so uniform and normal draws are derived by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // [lo, hi] inclusive
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool coin(double p = 0.5) { return uniform() < p; }
  double normal() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * uniform());
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

inline FunctionKey key_of(std::size_t i) { return {"f" + std::to_string(i / 7) + ".c", static_cast<int>(i % 7) * 10 + 1, static_cast<int>(i % 7) * 10 + 8}; }

// Records and catalog for n random vectors; unit ids are zero-padded so that
// id order equals numeric order.
struct RandomCorpus {
  std::vector<EmbeddingRecord> records;
  UnitCatalog catalog;
};

inline std::string unit_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "u%06zu", i);
  return buf;
}

inline RandomCorpus random_corpus(Rng& rng, std::size_t n, int dim, const std::string& model = "m") {
  RandomCorpus c;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXf v(dim);
    for (int d = 0; d < dim; ++d) v[d] = static_cast<float>(rng.normal());
    if (v.norm() == 0.0f) v[0] = 1.0f;
    c.records.push_back({unit_name(i), model, v});
    c.catalog.emplace(unit_name(i), key_of(i));
  }
  return c;
}

// A random valid candidate list over a pool of `pool` function keys.
inline CandidateList random_list(Rng& rng, const std::string& model, std::size_t pool, std::size_t max_items,
                                 bool allow_ties = true) {
  CandidateList list;
  list.model_id = model;
  list.params.global_top_k = max_items;
  list.params.similarity_threshold = -1.0;
  const std::size_t want = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_items)));
  std::set<PairKey> used;
  for (std::size_t tries = 0; list.items.size() < want && tries < 20 * want; ++tries) {
    const auto x = rng.index(pool);
    const auto y = rng.index(pool);
    if (x == y) continue;
    Candidate c{key_of(x), key_of(y), 0.0};
    if (!used.insert(c.key()).second) continue;
    c.score = allow_ties && rng.coin(0.2) ? std::round(rng.uniform(-1.0, 1.0) * 4.0) / 4.0 : rng.uniform(-1.0, 1.0);
    list.items.push_back(c);
  }
  std::sort(list.items.begin(), list.items.end(), ranks_before);
  return list;
}

// Independent O(N^2) reference for self_search: naive dot products, per-unit
// class selection, threshold, canonical dedup keeping the max, global sort.
inline CandidateList brute_force_self_search(const std::vector<EmbeddingRecord>& records, const UnitCatalog& catalog,
                                             const SearchParams& params) {
  const std::size_t n = records.size();
  std::vector<std::vector<double>> unit(n);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (Eigen::Index d = 0; d < records[i].vector.size(); ++d) norm += double(records[i].vector[d]) * records[i].vector[d];
    norm = std::sqrt(norm);
    for (Eigen::Index d = 0; d < records[i].vector.size(); ++d) unit[i].push_back(records[i].vector[d] / norm);
  }
  std::map<PairKey, double> best;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> row;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double s = 0.0;
      for (std::size_t d = 0; d < unit[i].size(); ++d) s += unit[i][d] * unit[j][d];
      row.emplace_back(s, j);
    }
    std::sort(row.begin(), row.end(), [&](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return records[x.second].unit_id < records[y.second].unit_id;
    });
    row.resize(std::min(row.size(), static_cast<std::size_t>(params.top_n_class)));
    for (const auto& [s, j] : row) {
      if (s < params.similarity_threshold) continue;
      const auto key = canonical_pair(catalog.at(records[i].unit_id), catalog.at(records[j].unit_id));
      auto [it, fresh] = best.emplace(key, s);
      if (!fresh) it->second = std::max(it->second, s);
    }
  }
  CandidateList out;
  out.model_id = records.empty() ? "" : records.front().model_id;
  out.params = params;
  for (const auto& [key, s] : best) out.items.push_back({key.first, key.second, s});
  std::stable_sort(out.items.begin(), out.items.end(),
                   [](const Candidate& x, const Candidate& y) { return x.score > y.score; });
  if (out.items.size() > params.global_top_k) out.items.resize(params.global_top_k);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic C corpus with planted clones. Originals are random functions over
// a small identifier vocabulary; each clone copies an original, renames one
// identifier and inserts one statement.

struct SyntheticFile {
  std::string path;
  std::string text;
};

struct SyntheticCorpus {
  std::vector<SyntheticFile> files;
  std::vector<TruthPair> truth;
  std::size_t functions = 0;
};

namespace detail {

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words{
      "count", "total", "index", "buffer", "length", "offset", "value", "result", "node", "next", "head",
      "tail", "key", "hash", "limit", "width", "height", "depth", "flags", "mask", "state", "mode",
      "error", "status", "size", "capacity", "cursor", "start", "stop", "delta", "scale", "weight",
      "left", "right", "lower", "upper", "prev", "item", "entry", "slot", "bucket", "chunk", "frame",
      "packet", "header", "payload", "checksum", "timeout", "retries", "channel", "port", "socket"};
  return words;
}

inline std::string pick(Rng& rng, const std::vector<std::string>& from) { return from[rng.index(from.size())]; }

inline std::vector<std::string> random_body(Rng& rng, const std::vector<std::string>& vars) {
  const auto& ops = std::vector<std::string>{"+", "-", "*", "^", "&", "|"};
  std::vector<std::string> lines;
  const auto statements = rng.between(4, 10);
  for (std::int64_t s = 0; s < statements; ++s) {
    const auto a = pick(rng, vars);
    const auto b = pick(rng, vars);
    const auto k = std::to_string(rng.between(1, 999));
    switch (rng.between(0, 5)) {
      case 0: lines.push_back("  " + a + " = " + b + " " + pick(rng, ops) + " " + k + ";"); break;
      case 1: lines.push_back("  if (" + a + " > " + k + ") " + b + " = " + a + " " + pick(rng, ops) + " " + b + ";"); break;
      case 2:
        lines.push_back("  for (int i = 0; i < " + k + "; i++) {");
        lines.push_back("    " + a + " += " + b + " " + pick(rng, ops) + " i;");
        lines.push_back("  }");
        break;
      case 3: lines.push_back("  " + a + " = " + b + " << " + std::to_string(rng.between(1, 7)) + ";"); break;
      case 4:
        lines.push_back("  while (" + a + " != " + b + ") {");
        lines.push_back("    " + a + " = (" + a + " " + pick(rng, ops) + " " + k + ") % " + std::to_string(rng.between(2, 97)) + ";");
        lines.push_back("  }");
        break;
      default: lines.push_back("  " + a + " ^= " + b + " + " + k + ";"); break;
    }
  }
  lines.push_back("  return " + pick(rng, vars) + ";");
  return lines;
}

inline std::string replace_word(const std::string& line, const std::string& from, const std::string& to) {
  std::string out;
  std::size_t i = 0;
  const auto ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < line.size()) {
    if (line.compare(i, from.size(), from) == 0 && (i == 0 || !ident(line[i - 1])) &&
        (i + from.size() >= line.size() || !ident(line[i + from.size()]))) {
      out += to;
      i += from.size();
    } else {
      out += line[i++];
    }
  }
  return out;
}

}  // namespace detail

inline SyntheticCorpus make_synthetic_corpus(std::size_t functions = 200, std::size_t clones = 20,
                                             std::uint64_t seed = 2026, std::size_t per_file = 20) {
  Rng rng(seed);
  struct Fn {
    std::string signature;
    std::vector<std::string> body;
    std::vector<std::string> vars;
    std::ptrdiff_t clone_of = -1;
  };
  std::vector<Fn> fns;
  const std::size_t originals = functions - clones;
  for (std::size_t i = 0; i < originals; ++i) {
    Fn f;
    std::vector<std::string> pool = detail::vocabulary();
    rng.shuffle(pool);
    f.vars.assign(pool.begin(), pool.begin() + rng.between(3, 5));
    f.signature = "int " + detail::pick(rng, detail::vocabulary()) + "_fn" + std::to_string(i) + "(int " +
                  f.vars[0] + ", int " + f.vars[1] + ") {";
    f.body.push_back("  int " + f.vars[2] + " = " + std::to_string(rng.between(0, 99)) + ";");
    for (std::size_t v = 3; v < f.vars.size(); ++v) f.body.push_back("  int " + f.vars[v] + " = " + f.vars[0] + ";");
    for (auto& l : detail::random_body(rng, f.vars)) f.body.push_back(std::move(l));
    fns.push_back(std::move(f));
  }
  std::vector<std::size_t> sources(originals);
  for (std::size_t i = 0; i < originals; ++i) sources[i] = i;
  rng.shuffle(sources);
  for (std::size_t c = 0; c < clones; ++c) {
    const Fn& src = fns[sources[c]];
    Fn f = src;
    f.clone_of = static_cast<std::ptrdiff_t>(sources[c]);
    const auto renamed = src.vars[rng.index(src.vars.size())];
    const auto fresh = renamed + "_v" + std::to_string(c);
    f.signature = detail::replace_word(src.signature, renamed, fresh);
    f.signature.replace(f.signature.find("_fn"), 3, "_clone" + std::to_string(c) + "_fn");
    for (auto& l : f.body) l = detail::replace_word(l, renamed, fresh);
    const auto at = 1 + rng.index(f.body.size() - 1);
    f.body.insert(f.body.begin() + static_cast<std::ptrdiff_t>(at),
                  "  " + detail::replace_word(src.vars[0], renamed, fresh) + " += " + std::to_string(rng.between(1, 9)) + ";");
    fns.push_back(std::move(f));
  }

  std::vector<std::size_t> order(fns.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  SyntheticCorpus corpus;
  corpus.functions = fns.size();
  std::vector<FunctionKey> where(fns.size());
  for (std::size_t start = 0; start < order.size(); start += per_file) {
    char name[32];
    std::snprintf(name, sizeof(name), "src/unit%02zu.c", start / per_file);
    SyntheticFile file{name, "#include <stdint.h>\n"};
    int line = 1;
    for (std::size_t k = start; k < std::min(order.size(), start + per_file); ++k) {
      const Fn& f = fns[order[k]];
      file.text += "\n";
      line += 1;
      const int first = line + 1;
      file.text += f.signature + "\n";
      for (const auto& l : f.body) file.text += l + "\n";
      file.text += "}\n";
      line += 1 + static_cast<int>(f.body.size()) + 1;
      where[order[k]] = {file.path, first, line};
    }
    corpus.files.push_back(std::move(file));
  }
  for (std::size_t i = 0; i < fns.size(); ++i) {
    if (fns[i].clone_of >= 0) {
      corpus.truth.push_back({canonical_pair(where[static_cast<std::size_t>(fns[i].clone_of)], where[i]), std::nullopt});
    }
  }
  std::sort(corpus.truth.begin(), corpus.truth.end(),
            [](const TruthPair& x, const TruthPair& y) { return x.key < y.key; });
  return corpus;
}

inline std::string truth_csv(const std::vector<TruthPair>& truth) {
  std::string out = "# a_path,a_start,a_end,b_path,b_start,b_end\n";
  for (const auto& t : truth) {
    out += t.key.first.path + "," + std::to_string(t.key.first.start_line) + "," + std::to_string(t.key.first.end_line) +
           "," + t.key.second.path + "," + std::to_string(t.key.second.start_line) + "," +
           std::to_string(t.key.second.end_line) + "\n";
  }
  return out;
}

inline void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& root) {
  for (const auto& f : corpus.files) spit(root / f.path, f.text);
  spit(root / "truth.csv", truth_csv(corpus.truth));
}

}  // namespace clonefuse::testing
