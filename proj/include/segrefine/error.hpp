#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace segrefine {

/// Failure classes raised by the library. Each maps to a distinct CLI exit code.
enum class ErrorCode {
  InvalidArgument,
  FileNotFound,
  IoError,
  BadMagic,
  TruncatedFile,
  NonFiniteValue,
  InvalidLabelValue,
  UnsupportedPngLayout,
  DimensionMismatch,
  WrongChannelCount,
  EmptyImage,
  EmptyMatrix,
  NoPixelsOfClass,
  EmptyDataset,
  InvalidWeights,
  InstanceTooLarge,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InvalidLabelValue: return "InvalidLabelValue";
    case ErrorCode::UnsupportedPngLayout: return "UnsupportedPngLayout";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::WrongChannelCount: return "WrongChannelCount";
    case ErrorCode::EmptyImage: return "EmptyImage";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::NoPixelsOfClass: return "NoPixelsOfClass";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
  }
  return "Unknown";
}

}  // namespace segrefine
