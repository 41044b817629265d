#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rawrestore {

// Stable identifiers; the CLI prints them verbatim on failure.
enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  ColorSpace,
  Io,
  Format,
  Config,
  MissingData,
};

constexpr std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "E_INVALID_ARGUMENT";
    case ErrorCode::DimensionMismatch: return "E_DIMENSION_MISMATCH";
    case ErrorCode::ColorSpace: return "E_COLOR_SPACE";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::Format: return "E_FORMAT";
    case ErrorCode::Config: return "E_CONFIG";
    case ErrorCode::MissingData: return "E_MISSING_DATA";
  }
  return "E_UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace rawrestore
