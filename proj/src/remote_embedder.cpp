// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <thread>

// Eigen must precede httplib: <resolv.h> defines a `_res` macro that
// clashes with Eigen parameter names.
#include "clonefuse/embed.hpp"
#include "clonefuse/error.hpp"
#include "clonefuse/parallel.hpp"

#include <httplib.h>
#include <json.hpp>

namespace clonefuse {

using nlohmann::json;

namespace {

class HttpTransport final : public EmbedTransport {
 public:
  HttpTransport(std::string endpoint, std::chrono::milliseconds timeout)
      : endpoint_(std::move(endpoint)), timeout_(timeout) {}

  TransportReply post(const std::string& route, const std::string& body) override {
    httplib::Client client(endpoint_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    auto res = client.Post(route, body, "application/json");
    TransportReply reply;
    if (!res) {
      reply.error = httplib::to_string(res.error());
      return reply;
    }
    reply.ok = true;
    reply.status = res->status;
    reply.body = res->body;
    return reply;
  }

 private:
  std::string endpoint_;
  std::chrono::milliseconds timeout_;
};

std::vector<Eigen::VectorXf> request_batch(EmbedTransport& transport, const RetryPolicy& retry,
                                           const EmbedderSpec& spec,
                                           const std::vector<FunctionUnit>& units,
                                           std::size_t begin, std::size_t end,
                                           std::size_t batch_index) {
  json texts = json::array();
  for (std::size_t i = begin; i < end; ++i) texts.push_back(units[i].text);
  const std::string echo = spec.model_id + "#" + std::to_string(batch_index) + "#" + units[begin].id;
  const json request = {{"model", spec.model_id},
                        {"code_length", spec.code_length},
                        {"texts", std::move(texts)},
                        {"echo", echo}};
  const std::string body = request.dump();

  TransportReply reply;
  auto backoff = retry.initial_backoff;
  for (int attempt = 1; attempt <= retry.max_attempts; ++attempt) {
    reply = transport.post("/embed", body);
    if (reply.ok) break;
    if (attempt < retry.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  if (!reply.ok) {
    throw Error(ErrorCode::kTransportFailure,
                "embedding sidecar unreachable after " + std::to_string(retry.max_attempts) +
                    " attempts: " + reply.error);
  }

  json doc;
  try {
    doc = json::parse(reply.body);
  } catch (const json::exception&) {
    throw Error(ErrorCode::kServiceError,
                "sidecar returned status " + std::to_string(reply.status) + " with a non-JSON body");
  }
  if (reply.status != 200 || doc.contains("error")) {
    std::string message = doc.value("error", std::string("status ") + std::to_string(reply.status));
    if (doc.contains("index") && doc["index"].is_number_integer()) {
      const auto idx = doc["index"].get<std::size_t>();
      message += " (text index " + std::to_string(idx);
      if (begin + idx < end) message += ", unit " + units[begin + idx].id;
      message += ")";
    }
    throw Error(ErrorCode::kServiceError, message);
  }
  if (doc.value("echo", std::string()) != echo) {
    throw Error(ErrorCode::kServiceError, "echo token mismatch: response does not match batch " +
                                              std::to_string(batch_index));
  }
  const auto& vectors = doc.at("vectors");
  if (!vectors.is_array() || vectors.size() != end - begin) {
    throw Error(ErrorCode::kServiceError, "batch " + std::to_string(batch_index) + " expected " +
                                              std::to_string(end - begin) + " vectors");
  }
  std::vector<Eigen::VectorXf> out;
  out.reserve(end - begin);
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    const auto& row = vectors[k];
    const std::string& unit_id = units[begin + k].id;
    if (!row.is_array() || static_cast<int>(row.size()) != spec.dimension) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "unit " + unit_id + " received a vector of length " +
                      std::to_string(row.is_array() ? row.size() : 0) + ", expected " +
                      std::to_string(spec.dimension));
    }
    Eigen::VectorXf v(spec.dimension);
    for (int d = 0; d < spec.dimension; ++d) {
      const auto& x = row[static_cast<std::size_t>(d)];
      if (!x.is_number()) {
        throw Error(ErrorCode::kServiceError, "unit " + unit_id + " has a non-numeric component");
      }
      v[d] = x.get<float>();
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

std::unique_ptr<EmbedTransport> make_http_transport(const std::string& endpoint,
                                                    std::chrono::milliseconds timeout) {
  return std::make_unique<HttpTransport>(endpoint, timeout);
}

std::vector<EmbeddingRecord> embed_remote(const std::vector<FunctionUnit>& units,
                                          const EmbedderSpec& spec, EmbedTransport& transport,
                                          const RetryPolicy& retry) {
  validate(spec);
  if (spec.backend != EmbedBackend::kRemote) {
    throw Error(ErrorCode::kInvalidArgument, "embed_remote requires backend=remote");
  }
  const auto batch = static_cast<std::size_t>(spec.batch_size);
  const std::size_t batches = (units.size() + batch - 1) / batch;
  std::vector<std::vector<Eigen::VectorXf>> results(batches);
  parallel_for(batches, static_cast<unsigned>(spec.max_in_flight), [&](std::size_t b) {
    const std::size_t begin = b * batch;
    const std::size_t end = std::min(units.size(), begin + batch);
    results[b] = request_batch(transport, retry, spec, units, begin, end, b);
  });

  std::vector<EmbeddingRecord> out;
  out.reserve(units.size());
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t k = 0; k < results[b].size(); ++k) {
      EmbeddingRecord rec{units[b * batch + k].id, spec.model_id, std::move(results[b][k])};
      if (!rec.vector.allFinite()) {
        throw Error(ErrorCode::kServiceError, "unit " + rec.unit_id + " has non-finite components");
      }
      validate_record(rec, spec.dimension);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<EmbeddingRecord> embed_remote(const std::vector<FunctionUnit>& units,
                                          const EmbedderSpec& spec) {
  auto transport = make_http_transport(spec.endpoint, std::chrono::seconds(60));
  return embed_remote(units, spec, *transport);
}

}  // namespace clonefuse
