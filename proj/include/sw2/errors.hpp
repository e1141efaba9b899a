#ifndef SW2_ERRORS_HPP
#define SW2_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace sw2 {

enum class ErrorCode {
  NonHermitianInput,
  ConvergenceFailure,
  IndefiniteInput,
  DimensionMismatch,
  NegativeDistance,
  SingularAr,
  UnstableModel,
  GridTooCoarse,
  NotPositiveDefinite,
  LagTooLarge,
  NonRealResidue,
  TooFewSegments,
  GridMismatch,
  InvalidArgument,
  FileNotFound,
  ParseError,
};

std::string_view error_name(ErrorCode code) noexcept;

/// All library failures are reported through this exception; `code()` names
/// the violated precondition so callers (the CLI in particular) can map it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sw2

#endif  // SW2_ERRORS_HPP
