// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clonefuse {

enum class ErrorCode {
  kInvalidArgument,
  kIoError,
  // corpus
  kUnsupportedLanguage,
  kMalformedInput,
  kFormatViolation,
  kDuplicateId,
  // embed
  kZeroVector,
  kTransportFailure,
  kDimensionMismatch,
  kServiceError,
  // annindex
  kTooFewVectors,
  kUnknownUnit,
  kModelMismatch,
  kParamsMismatch,
  // fusion
  kEmptyList,
  kTooFewLists,
  // evalkit
  kEmptyGroundTruth,
  kUntypedPairs,
  kEmptyLabels,
  kMissingRank,
  // statlab
  kZeroVariance,
  kRankDeficient,
  kTooFewSamples,
  kDegenerateSample,
  kTooFewNonzero,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `code()` identifies the contract
/// violation; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace clonefuse
