#include "crossreg/error.hpp"

namespace crossreg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OnLocus: return "OnLocus";
    case ErrorCode::BadAxis: return "BadAxis";
    case ErrorCode::DuplicateAxis: return "DuplicateAxis";
    case ErrorCode::EmptyLocus: return "EmptyLocus";
    case ErrorCode::OnDivisor: return "OnDivisor";
    case ErrorCode::UnsupportedMollifier: return "UnsupportedMollifier";
    case ErrorCode::UnsupportedChart: return "UnsupportedChart";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::Escape: return "Escape";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::Tangency: return "Tangency";
    case ErrorCode::SlidingDetected: return "SlidingDetected";
    case ErrorCode::DegenerateAngle: return "DegenerateAngle";
    case ErrorCode::SingularChange: return "SingularChange";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotSmooth: return "NotSmooth";
    case ErrorCode::DegenerateParameters: return "DegenerateParameters";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IOFailure: return "IOFailure";
  }
  return "Unknown";
}

}  // namespace crossreg
