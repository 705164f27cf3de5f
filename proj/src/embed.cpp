// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "clonefuse/embed.hpp"

#include <cmath>
#include <unordered_map>

#include "clonefuse/error.hpp"
#include "clonefuse/parallel.hpp"

namespace clonefuse {

std::string_view to_string(EmbedBackend backend) {
  switch (backend) {
    case EmbedBackend::kMock: return "mock";
    case EmbedBackend::kRemote: return "remote";
    case EmbedBackend::kFile: return "file";
  }
  return "mock";
}

EmbedBackend parse_embed_backend(std::string_view name) {
  if (name == "mock") return EmbedBackend::kMock;
  if (name == "remote") return EmbedBackend::kRemote;
  if (name == "file") return EmbedBackend::kFile;
  throw Error(ErrorCode::kInvalidArgument, "unknown embed backend '" + std::string(name) + "'");
}

void validate(const EmbedderSpec& spec) {
  if (spec.model_id.empty()) throw Error(ErrorCode::kInvalidArgument, "model_id is empty");
  if (spec.dimension < 1) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  if (spec.code_length < 1) throw Error(ErrorCode::kInvalidArgument, "code_length must be >= 1");
  if (spec.batch_size < 1) throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  if (spec.max_in_flight < 1) throw Error(ErrorCode::kInvalidArgument, "max_in_flight must be >= 1");
  if ((spec.backend == EmbedBackend::kRemote || spec.backend == EmbedBackend::kFile) &&
      spec.endpoint.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "backend requires an endpoint");
  }
}

void validate_record(const EmbeddingRecord& record, int dimension) {
  if (record.vector.size() != dimension) {
    throw Error(ErrorCode::kDimensionMismatch,
                "unit " + record.unit_id + " has dimension " + std::to_string(record.vector.size()) +
                    ", expected " + std::to_string(dimension));
  }
  if (!record.vector.allFinite()) {
    throw Error(ErrorCode::kFormatViolation, "unit " + record.unit_id + " has non-finite components");
  }
  if (record.vector.cast<double>().squaredNorm() == 0.0) {
    throw Error(ErrorCode::kZeroVector, "unit " + record.unit_id + " has a zero vector");
  }
}

std::string truncate_tokens(std::string_view text, int code_length) {
  std::string out;
  int taken = 0;
  std::size_t i = 0;
  const auto ws = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (i < text.size() && taken < code_length) {
    while (i < text.size() && ws(text[i])) ++i;
    if (i >= text.size()) break;
    const std::size_t b = i;
    while (i < text.size() && !ws(text[i])) ++i;
    if (taken > 0) out.push_back(' ');
    out.append(text.substr(b, i - b));
    ++taken;
  }
  return out;
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trigram_hash(std::uint64_t seed, const char* p) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc908ULL);
  for (int k = 0; k < 3; ++k) {
    h = mix64(h ^ static_cast<unsigned char>(p[k]));
  }
  return h;
}

Eigen::VectorXf mock_vector(const FunctionUnit& unit, const EmbedderSpec& spec) {
  const std::string text = truncate_tokens(unit.text, spec.code_length);
  if (text.size() < 3) {
    throw Error(ErrorCode::kZeroVector, "unit " + unit.id + " has no character trigrams");
  }
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(spec.dimension);
  const auto dim = static_cast<std::uint64_t>(spec.dimension);
  for (std::size_t i = 0; i + 3 <= text.size(); ++i) {
    const std::uint64_t h = trigram_hash(spec.seed, text.data() + i);
    const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
    acc[static_cast<Eigen::Index>((h & 0x7fffffffffffffffULL) % dim)] += sign;
  }
  const double norm = acc.norm();
  if (norm == 0.0) {
    throw Error(ErrorCode::kZeroVector, "unit " + unit.id + " hashes to a zero vector");
  }
  return (acc / norm).cast<float>();
}

}  // namespace

std::vector<EmbeddingRecord> embed_mock(const std::vector<FunctionUnit>& units,
                                        const EmbedderSpec& spec) {
  validate(spec);
  if (spec.backend != EmbedBackend::kMock) {
    throw Error(ErrorCode::kInvalidArgument, "embed_mock requires backend=mock");
  }
  std::vector<EmbeddingRecord> out(units.size());
  parallel_for(units.size(), spec.threads, [&](std::size_t i) {
    out[i] = EmbeddingRecord{units[i].id, spec.model_id, mock_vector(units[i], spec)};
  });
  return out;
}

std::vector<EmbeddingRecord> embed_from_file(const std::vector<FunctionUnit>& units,
                                             const EmbedderSpec& spec) {
  validate(spec);
  LoadedVectors loaded = load_vectors(spec.endpoint, spec.model_id);
  if (loaded.records.empty() && !units.empty()) {
    throw Error(ErrorCode::kModelMismatch,
                spec.endpoint + " holds no vectors for model " + spec.model_id);
  }
  if (loaded.header.dimension != spec.dimension) {
    throw Error(ErrorCode::kDimensionMismatch,
                spec.endpoint + " has dimension " + std::to_string(loaded.header.dimension) +
                    ", expected " + std::to_string(spec.dimension));
  }
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < loaded.records.size(); ++i) by_id.emplace(loaded.records[i].unit_id, i);
  std::vector<EmbeddingRecord> out;
  out.reserve(units.size());
  for (const auto& u : units) {
    auto it = by_id.find(u.id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kFormatViolation, spec.endpoint + " has no vector for unit " + u.id);
    }
    out.push_back(loaded.records[it->second]);
  }
  return out;
}

std::vector<EmbeddingRecord> embed(const std::vector<FunctionUnit>& units,
                                   const EmbedderSpec& spec) {
  switch (spec.backend) {
    case EmbedBackend::kMock: return embed_mock(units, spec);
    case EmbedBackend::kRemote: return embed_remote(units, spec);
    case EmbedBackend::kFile: return embed_from_file(units, spec);
  }
  return {};
}

}  // namespace clonefuse
