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

#ifndef MLMAUDIT_ERROR_H_
#define MLMAUDIT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlmaudit {

enum class ErrorCode {
  kMissingColumn,
  kDuplicateRole,
  kParseError,
  kMissingValue,
  kEmptyDataset,
  kGroupTooSmall,
  kInvalidArgument,
  kUnknownGroup,
  kDegenerateGroup,
  kSeparationDetected,
  kConstantColumn,
  kSampleTooSmall,
  kSampleTooLarge,
  kConstantSample,
  kRankDeficientDesign,
  kSingleClass,
  kEmptySide,
  kZeroDenominator,
  kUndefinedRate,
  kTooManyFeatures,
  kDegenerateBackground,
  kDegenerateWeights,
  kUnknownKpi,
  kNonFiniteValue,
  kConfigError,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every recoverable failure in the library surfaces as an AuditError
// carrying a machine-readable code; what() starts with the code name.
class AuditError : public std::runtime_error {
 public:
  AuditError(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mlmaudit

#endif  // MLMAUDIT_ERROR_H_
