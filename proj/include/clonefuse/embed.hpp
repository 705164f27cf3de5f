// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "clonefuse/corpus.hpp"

namespace clonefuse {

enum class EmbedBackend { kMock, kRemote, kFile };

std::string_view to_string(EmbedBackend backend);
EmbedBackend parse_embed_backend(std::string_view name);

struct EmbedderSpec {
  EmbedBackend backend = EmbedBackend::kMock;
  std::string model_id;
  int dimension = 256;
  int code_length = 128;
  std::uint64_t seed = 0;
  /// Remote: base URL of the embedding sidecar. File: path of a vector store.
  std::string endpoint;
  int batch_size = 32;
  int max_in_flight = 4;
  /// Threads for local (mock) embedding.
  unsigned threads = 1;
};

/// Throws InvalidArgument when EmbedderSpec invariants do not hold.
void validate(const EmbedderSpec& spec);

struct EmbeddingRecord {
  std::string unit_id;
  std::string model_id;
  Eigen::VectorXf vector;

  bool operator==(const EmbeddingRecord& other) const {
    return unit_id == other.unit_id && model_id == other.model_id &&
           vector.size() == other.vector.size() && vector == other.vector;
  }
};

/// Checks length, finiteness and non-zero norm; throws DimensionMismatch or
/// ZeroVector naming the unit.
void validate_record(const EmbeddingRecord& record, int dimension);

/// Keeps the first `code_length` whitespace-delimited tokens, joined by single
/// spaces.
std::string truncate_tokens(std::string_view text, int code_length);

/// Deterministic stand-in for a learned encoder: signed feature hashing of
/// character trigrams (of the truncated text) into `dimension` buckets, seeded
/// by spec.seed, then L2-normalised.
std::vector<EmbeddingRecord> embed_mock(const std::vector<FunctionUnit>& units,
                                        const EmbedderSpec& spec);

/// Result of one POST to the embedding sidecar. `ok == false` means the
/// request never produced an HTTP response (connection refused, timeout).
struct TransportReply {
  bool ok = false;
  int status = 0;
  std::string body;
  std::string error;
};

/// Pluggable request channel so batching and retry logic can be exercised
/// without a network.
class EmbedTransport {
 public:
  virtual ~EmbedTransport() = default;
  virtual TransportReply post(const std::string& route, const std::string& body) = 0;
};

/// HTTP transport over cpp-httplib. `endpoint` is "http://host:port".
std::unique_ptr<EmbedTransport> make_http_transport(const std::string& endpoint,
                                                    std::chrono::milliseconds timeout);

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
};

/// Batched client for the sidecar protocol (route /embed). Batches of
/// spec.batch_size are sent with up to spec.max_in_flight in flight; results
/// come back in input order.
std::vector<EmbeddingRecord> embed_remote(const std::vector<FunctionUnit>& units,
                                          const EmbedderSpec& spec, EmbedTransport& transport,
                                          const RetryPolicy& retry = {});
std::vector<EmbeddingRecord> embed_remote(const std::vector<FunctionUnit>& units,
                                          const EmbedderSpec& spec);

/// Reads vectors produced offline (spec.endpoint is the store path) and
/// checks that every unit has exactly one vector.
std::vector<EmbeddingRecord> embed_from_file(const std::vector<FunctionUnit>& units,
                                             const EmbedderSpec& spec);

/// Dispatches on spec.backend.
std::vector<EmbeddingRecord> embed(const std::vector<FunctionUnit>& units,
                                   const EmbedderSpec& spec);

// ---------------------------------------------------------------------------
// Vector store
//
// Text encoding: JSON lines; header {"model_id","dimension","normalized"},
// then {"unit_id","vector":[...]} per row.
// Binary encoding: 16-byte preamble "CFVECSTR" + u32 version + u32 reserved,
// then u32 model_id length + bytes, u32 dimension, u8 normalized, u64 rows;
// each row is u32 unit_id length + bytes + dimension little-endian f32.

enum class VectorEncoding { kBinary, kText };

struct VectorStoreHeader {
  std::string model_id;
  int dimension = 0;
  bool normalized = false;
};

void store_vectors(const std::filesystem::path& path, const std::vector<EmbeddingRecord>& records,
                   bool normalized, VectorEncoding encoding = VectorEncoding::kBinary);

struct LoadedVectors {
  VectorStoreHeader header;
  std::vector<EmbeddingRecord> records;
};

/// Encoding is detected from the preamble. When `model_filter` is given and
/// differs from the stored model, the result has no records.
LoadedVectors load_vectors(const std::filesystem::path& path,
                           const std::optional<std::string>& model_filter = std::nullopt);

}  // namespace clonefuse
