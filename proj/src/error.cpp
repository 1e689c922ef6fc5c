// SPDX-License-Identifier: Apache-2.0

#include "rfaug/error.hpp"

namespace rfaug {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MetadataParse: return "MetadataParse";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::InvalidBox: return "InvalidBox";
    case ErrorCode::FullMask: return "FullMask";
    case ErrorCode::IncompatiblePair: return "IncompatiblePair";
    case ErrorCode::CompositionOverflow: return "CompositionOverflow";
    case ErrorCode::MissingAttribute: return "MissingAttribute";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::ClosedHandle: return "ClosedHandle";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::Cancelled: return "Cancelled";
  }
  return "Unknown";
}

}  // namespace rfaug
