/*
 * Copyright 2026 The mlmaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mlmaudit/error.h"

#include <string>

namespace mlmaudit {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kDuplicateRole: return "DuplicateRole";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMissingValue: return "MissingValue";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kGroupTooSmall: return "GroupTooSmall";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kUnknownGroup: return "UnknownGroup";
    case ErrorCode::kDegenerateGroup: return "DegenerateGroup";
    case ErrorCode::kSeparationDetected: return "SeparationDetected";
    case ErrorCode::kConstantColumn: return "ConstantColumn";
    case ErrorCode::kSampleTooSmall: return "SampleTooSmall";
    case ErrorCode::kSampleTooLarge: return "SampleTooLarge";
    case ErrorCode::kConstantSample: return "ConstantSample";
    case ErrorCode::kRankDeficientDesign: return "RankDeficientDesign";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kEmptySide: return "EmptySide";
    case ErrorCode::kZeroDenominator: return "ZeroDenominator";
    case ErrorCode::kUndefinedRate: return "UndefinedRate";
    case ErrorCode::kTooManyFeatures: return "TooManyFeatures";
    case ErrorCode::kDegenerateBackground: return "DegenerateBackground";
    case ErrorCode::kDegenerateWeights: return "DegenerateWeights";
    case ErrorCode::kUnknownKpi: return "UnknownKpi";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

AuditError::AuditError(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace mlmaudit
