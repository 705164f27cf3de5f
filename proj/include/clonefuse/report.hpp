// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "clonefuse/evalkit.hpp"

namespace clonefuse {

/// Left-aligned first column, right-aligned others, columns padded to width.
std::string format_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);

/// Two decimals, the precision of the published tables.
std::string fixed2(double value);

/// One row per model: recall at each cutoff then the average.
std::string render_recall_table(const std::vector<std::pair<std::string, RecallReport>>& rows);
std::string render_typed_table(const std::vector<std::pair<std::string, TypedRecall>>& rows);
std::string render_borda_table(const BordaTable& table);

/// Single-line JSON records, for machine consumption.
std::string recall_json(const std::string& label, const RecallReport& report);
std::string typed_json(const std::string& label, const TypedRecall& report);
std::string borda_json(const BordaTable& table);

}  // namespace clonefuse
