#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wsntrack {

enum class ErrorCode {
  DegenerateGeometry,
  DuplicateAnchor,
  TooFewObservations,
  EmptySiteList,
  KTooLarge,
  InvalidConfig,
  NodeDead,
  UnknownNode,
  OutOfSinkRange,
  OutOfRange,
  ConfigParse,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::DuplicateAnchor: return "DuplicateAnchor";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::EmptySiteList: return "EmptySiteList";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NodeDead: return "NodeDead";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::OutOfSinkRange: return "OutOfSinkRange";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ConfigParse: return "ConfigParse";
  }
  return "Unknown";
}

// All library failures surface as this exception; code() identifies the kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wsntrack
