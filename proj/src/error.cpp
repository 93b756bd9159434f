#include "polyclt/error.hpp"

namespace polyclt {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularBasis: return "SingularBasis";
    case ErrorCode::NotCompact: return "NotCompact";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::NotPositivized: return "NotPositivized";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::InfeasiblePoint: return "InfeasiblePoint";
    case ErrorCode::GramSingular: return "GramSingular";
    case ErrorCode::PartitionNotFound: return "PartitionNotFound";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::StartNotInterior: return "StartNotInterior";
    case ErrorCode::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
    case ErrorCode::DenominatorTooSmall: return "DenominatorTooSmall";
    case ErrorCode::BoxUnboundedWithoutDecay: return "BoxUnboundedWithoutDecay";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::SigmaZero: return "SigmaZero";
    case ErrorCode::SupportViolation: return "SupportViolation";
  }
  return "Unknown";
}

}  // namespace polyclt
