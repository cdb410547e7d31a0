#pragma once

#include <stdexcept>
#include <string>

namespace aniso {

enum class ErrorCode {
  kNotExpansive,
  kSingularMatrix,
  kConstructionFailed,
  kEmptyRegime,
  kBracketFailure,
  kSupportOverflow,
  kGridMismatch,
  kDegenerateSeed,
  kGramIllConditioned,
  kIndexSearchOverflow,
  kConfigError,
};

const char* to_string(ErrorCode code);

/// All library failures carry a stable code plus a human-readable detail;
/// what() is "<CodeName>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotExpansive: return "NotExpansive";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kConstructionFailed: return "ConstructionFailed";
    case ErrorCode::kEmptyRegime: return "EmptyRegime";
    case ErrorCode::kBracketFailure: return "BracketFailure";
    case ErrorCode::kSupportOverflow: return "SupportOverflow";
    case ErrorCode::kGridMismatch: return "GridMismatch";
    case ErrorCode::kDegenerateSeed: return "DegenerateSeed";
    case ErrorCode::kGramIllConditioned: return "GramIllConditioned";
    case ErrorCode::kIndexSearchOverflow: return "IndexSearchOverflow";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace aniso
