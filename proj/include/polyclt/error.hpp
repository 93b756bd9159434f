#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyclt {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  SingularBasis,
  NotCompact,
  EmptyInterior,
  DomainViolation,
  NotPositivized,
  NotConverged,
  InfeasiblePoint,
  GramSingular,
  PartitionNotFound,
  RankDeficient,
  StartNotInterior,
  QuadratureBudgetExceeded,
  DenominatorTooSmall,
  BoxUnboundedWithoutDecay,
  DimensionTooLarge,
  TooFewSamples,
  SigmaZero,
  SupportViolation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace polyclt
