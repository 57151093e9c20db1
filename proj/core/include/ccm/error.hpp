#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccm {

enum class ErrorCode {
  InvalidArgument,
  QuadratureBudgetExceeded,
  DegeneratePolygon,
  UnsupportedOrder,
  InvalidControl,
  DegenerateAfterPerturbation,
  NotEulerian,
  InvalidStockyard,
  OutOfTableRange,
  HessianUnbounded,
  OutOfCylinder,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
    case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::InvalidControl: return "InvalidControl";
    case ErrorCode::DegenerateAfterPerturbation: return "DegenerateAfterPerturbation";
    case ErrorCode::NotEulerian: return "NotEulerian";
    case ErrorCode::InvalidStockyard: return "InvalidStockyard";
    case ErrorCode::OutOfTableRange: return "OutOfTableRange";
    case ErrorCode::HessianUnbounded: return "HessianUnbounded";
    case ErrorCode::OutOfCylinder: return "OutOfCylinder";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ccm
