// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "clonefuse/embed.hpp"
#include "clonefuse/error.hpp"
#include "text_util.hpp"

namespace clonefuse {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'C', 'F', 'V', 'E', 'C', 'S', 'T', 'R'};
constexpr std::uint32_t kVersion = 1;
constexpr double kNormTolerance = 1e-4;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  Reader(const std::string& data, std::string source) : data_(data), source_(std::move(source)) {}

  std::uint64_t uint(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  float f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(uint(4))); }

  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) {
      throw Error(ErrorCode::kFormatViolation,
                  source_ + ": truncated binary vector store at byte " + std::to_string(pos_));
    }
  }

  const std::string& data_;
  std::string source_;
  std::size_t pos_ = 0;
};

void check_normalized(const EmbeddingRecord& rec, const std::string& where, ErrorCode code) {
  const double norm = rec.vector.cast<double>().norm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw Error(code, where + ": unit " + rec.unit_id + " is declared normalized but has norm " +
                          std::to_string(norm));
  }
}

void write_atomically(const std::filesystem::path& path, const std::string& payload) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw Error(ErrorCode::kIoError, "write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

LoadedVectors load_binary(const std::string& data, const std::string& source) {
  Reader r(data, source);
  r.bytes(8);
  const auto version = r.uint(4);
  if (version != kVersion) {
    throw Error(ErrorCode::kFormatViolation,
                source + ": unsupported vector store version " + std::to_string(version));
  }
  r.uint(4);
  LoadedVectors out;
  out.header.model_id = r.bytes(static_cast<std::size_t>(r.uint(4)));
  out.header.dimension = static_cast<int>(r.uint(4));
  out.header.normalized = r.uint(1) != 0;
  const auto rows = r.uint(8);
  if (out.header.dimension < 1) throw Error(ErrorCode::kFormatViolation, source + ": dimension < 1");
  for (std::uint64_t row = 0; row < rows; ++row) {
    EmbeddingRecord rec;
    rec.unit_id = r.bytes(static_cast<std::size_t>(r.uint(4)));
    rec.model_id = out.header.model_id;
    rec.vector.resize(out.header.dimension);
    for (int d = 0; d < out.header.dimension; ++d) rec.vector[d] = r.f32();
    out.records.push_back(std::move(rec));
  }
  if (!r.done()) throw Error(ErrorCode::kFormatViolation, source + ": trailing bytes after rows");
  return out;
}

LoadedVectors load_text(const std::string& data, const std::string& source) {
  LoadedVectors out;
  const auto lines = detail::split_lines(data);
  bool have_header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::is_blank(lines[i])) continue;
    const std::string where = source + " line " + std::to_string(i + 1);
    json rec;
    try {
      rec = json::parse(lines[i]);
      if (!have_header) {
        out.header.model_id = rec.at("model_id").get<std::string>();
        out.header.dimension = rec.at("dimension").get<int>();
        out.header.normalized = rec.at("normalized").get<bool>();
        if (out.header.dimension < 1) throw Error(ErrorCode::kFormatViolation, where + ": dimension < 1");
        have_header = true;
        continue;
      }
      EmbeddingRecord row;
      row.unit_id = rec.at("unit_id").get<std::string>();
      row.model_id = out.header.model_id;
      const auto& values = rec.at("vector");
      if (!values.is_array()) throw Error(ErrorCode::kFormatViolation, where + ": vector is not an array");
      row.vector.resize(static_cast<Eigen::Index>(values.size()));
      for (std::size_t d = 0; d < values.size(); ++d) {
        row.vector[static_cast<Eigen::Index>(d)] = values[d].get<float>();
      }
      out.records.push_back(std::move(row));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormatViolation, where + ": " + e.what());
    }
  }
  if (!have_header) throw Error(ErrorCode::kFormatViolation, source + ": missing header record");
  return out;
}

}  // namespace

void store_vectors(const std::filesystem::path& path, const std::vector<EmbeddingRecord>& records,
                   bool normalized, VectorEncoding encoding) {
  if (records.empty()) throw Error(ErrorCode::kInvalidArgument, "no records to store");
  const std::string& model_id = records.front().model_id;
  const auto dimension = static_cast<int>(records.front().vector.size());
  std::unordered_set<std::string> seen;
  for (const auto& rec : records) {
    if (rec.model_id != model_id) {
      throw Error(ErrorCode::kModelMismatch, "vector store holds one model; got " + model_id +
                                                 " and " + rec.model_id);
    }
    validate_record(rec, dimension);
    if (normalized) check_normalized(rec, path.string(), ErrorCode::kInvalidArgument);
    if (!seen.insert(rec.unit_id).second) {
      throw Error(ErrorCode::kDuplicateId, "unit " + rec.unit_id + " stored twice");
    }
  }

  std::string payload;
  if (encoding == VectorEncoding::kBinary) {
    payload.append(kMagic, sizeof(kMagic));
    put_u32(payload, kVersion);
    put_u32(payload, 0);
    put_u32(payload, static_cast<std::uint32_t>(model_id.size()));
    payload += model_id;
    put_u32(payload, static_cast<std::uint32_t>(dimension));
    payload.push_back(normalized ? 1 : 0);
    put_u64(payload, records.size());
    for (const auto& rec : records) {
      put_u32(payload, static_cast<std::uint32_t>(rec.unit_id.size()));
      payload += rec.unit_id;
      for (int d = 0; d < dimension; ++d) put_u32(payload, std::bit_cast<std::uint32_t>(rec.vector[d]));
    }
  } else {
    payload += json{{"model_id", model_id}, {"dimension", dimension}, {"normalized", normalized}}.dump();
    payload.push_back('\n');
    for (const auto& rec : records) {
      json values = json::array();
      for (int d = 0; d < dimension; ++d) values.push_back(static_cast<double>(rec.vector[d]));
      payload += json{{"unit_id", rec.unit_id}, {"vector", std::move(values)}}.dump();
      payload.push_back('\n');
    }
  }
  write_atomically(path, payload);
}

LoadedVectors load_vectors(const std::filesystem::path& path,
                           const std::optional<std::string>& model_filter) {
  const std::string data = detail::read_file(path.string());
  const bool binary = data.size() >= sizeof(kMagic) && std::memcmp(data.data(), kMagic, sizeof(kMagic)) == 0;
  LoadedVectors out = binary ? load_binary(data, path.string()) : load_text(data, path.string());

  std::unordered_set<std::string> seen;
  for (const auto& rec : out.records) {
    validate_record(rec, out.header.dimension);
    if (out.header.normalized) check_normalized(rec, path.string(), ErrorCode::kFormatViolation);
    if (!seen.insert(rec.unit_id).second) {
      throw Error(ErrorCode::kDuplicateId, path.string() + ": unit " + rec.unit_id + " appears twice");
    }
  }
  if (model_filter && *model_filter != out.header.model_id) out.records.clear();
  return out;
}

}  // namespace clonefuse
