// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "clonefuse/report.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

namespace clonefuse {

using nlohmann::json;

std::string fixed2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string format_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  const auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < cells.size() ? cells[c] : "";
      const std::string pad(width[c] - cell.size(), ' ');
      if (c > 0) out += "  ";
      out += c == 0 ? cell + pad : pad + cell;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') + "\n";
  for (const auto& row : rows) out += line(row);
  return out;
}

std::string render_recall_table(const std::vector<std::pair<std::string, RecallReport>>& rows) {
  std::vector<std::string> header{"model"};
  if (!rows.empty()) {
    for (const auto k : rows.front().second.cutoffs) header.push_back("@" + std::to_string(k));
  }
  header.push_back("avg");
  std::vector<std::vector<std::string>> body;
  for (const auto& [label, report] : rows) {
    std::vector<std::string> cells{label};
    for (const double v : report.recall_at) cells.push_back(fixed2(v));
    cells.push_back(fixed2(report.average));
    body.push_back(std::move(cells));
  }
  return format_table(header, body);
}

std::string render_typed_table(const std::vector<std::pair<std::string, TypedRecall>>& rows) {
  std::vector<std::string> header{"model"};
  for (const auto t : all_clone_types()) header.emplace_back(to_string(t));
  header.push_back("avg");
  std::vector<std::vector<std::string>> body;
  for (const auto& [label, report] : rows) {
    std::vector<std::string> cells{label};
    for (const auto t : all_clone_types()) {
      auto it = report.per_type.find(t);
      cells.push_back(it == report.per_type.end() ? "-" : fixed2(it->second));
    }
    cells.push_back(fixed2(report.average));
    body.push_back(std::move(cells));
  }
  return format_table(header, body);
}

std::string render_borda_table(const BordaTable& table) {
  std::vector<std::string> header{"model"};
  for (const auto& d : table.datasets) header.push_back(d);
  header.push_back("total");
  header.push_back("stdev");
  std::vector<std::vector<std::string>> body;
  for (const auto& row : table.rows) {
    std::vector<std::string> cells{row.model};
    for (std::size_t i = 0; i < row.ranks.size(); ++i) {
      cells.push_back(std::to_string(row.ranks[i]) + " (" + std::to_string(row.counts[i]) + ")");
    }
    cells.push_back(std::to_string(row.total));
    cells.push_back(fixed2(row.rank_stdev));
    body.push_back(std::move(cells));
  }
  return format_table(header, body);
}

std::string recall_json(const std::string& label, const RecallReport& report) {
  json recall = json::object();
  for (std::size_t i = 0; i < report.cutoffs.size(); ++i) {
    recall[std::to_string(report.cutoffs[i])] = report.recall_at[i];
  }
  return json{{"label", label}, {"recall_at", recall}, {"average", report.average}}.dump();
}

std::string typed_json(const std::string& label, const TypedRecall& report) {
  json per = json::object();
  for (const auto& [t, v] : report.per_type) per[std::string(to_string(t))] = v;
  json absent = json::array();
  for (const auto t : report.absent) absent.push_back(std::string(to_string(t)));
  return json{{"label", label}, {"per_type", per}, {"absent", absent}, {"average", report.average}}.dump();
}

std::string borda_json(const BordaTable& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"model", row.model},
                    {"ranks", row.ranks},
                    {"borda", row.counts},
                    {"total", row.total},
                    {"rank_stdev", row.rank_stdev}});
  }
  return json{{"datasets", table.datasets}, {"rows", rows}}.dump();
}

}  // namespace clonefuse
