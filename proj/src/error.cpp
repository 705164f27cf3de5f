// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "clonefuse/error.hpp"

namespace clonefuse {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kUnsupportedLanguage: return "UnsupportedLanguage";
    case ErrorCode::kMalformedInput: return "MalformedInput";
    case ErrorCode::kFormatViolation: return "FormatViolation";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kTransportFailure: return "TransportFailure";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kServiceError: return "ServiceError";
    case ErrorCode::kTooFewVectors: return "TooFewVectors";
    case ErrorCode::kUnknownUnit: return "UnknownUnit";
    case ErrorCode::kModelMismatch: return "ModelMismatch";
    case ErrorCode::kParamsMismatch: return "ParamsMismatch";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kTooFewLists: return "TooFewLists";
    case ErrorCode::kEmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::kUntypedPairs: return "UntypedPairs";
    case ErrorCode::kEmptyLabels: return "EmptyLabels";
    case ErrorCode::kMissingRank: return "MissingRank";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kDegenerateSample: return "DegenerateSample";
    case ErrorCode::kTooFewNonzero: return "TooFewNonzero";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace clonefuse
