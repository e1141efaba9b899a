#include "sw2/errors.hpp"

namespace sw2 {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::IndefiniteInput: return "IndefiniteInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::SingularAr: return "SingularAr";
    case ErrorCode::UnstableModel: return "UnstableModel";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::LagTooLarge: return "LagTooLarge";
    case ErrorCode::NonRealResidue: return "NonRealResidue";
    case ErrorCode::TooFewSegments: return "TooFewSegments";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace sw2
