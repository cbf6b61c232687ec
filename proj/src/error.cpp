/* Copyright 2026 The Occlumark Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "occlumark/error.hpp"

namespace occlumark {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kDecodeError: return "DecodeError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kTooManyGrids: return "TooManyGrids";
    case ErrorCode::kSpecError: return "SpecError";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kNormalizationError: return "NormalizationError";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace occlumark
