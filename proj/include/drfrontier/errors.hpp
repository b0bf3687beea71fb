#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace drfrontier {

enum class ErrorCode {
    NonSquare,
    Asymmetric,
    NotPSD,
    DimensionMismatch,
    BudgetViolation,
    EmbeddingMismatch,
    NonZeroDiagonal,
    NegativeEntry,
    SingularD,
    NonPositiveQmax,
    NotSPD,
    SingularCovariance,
    MissingReturns,
    DegenerateReturns,
    TangencyInfeasible,
    RiskBelowMVP,
    DegenerateRho,
    NegativeVariance,
    ZeroVariance,
    MdpUnbounded,
    ParseError,
    TooFewRows,
    NonMonotoneDates,
    IoError,
    InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::Asymmetric: return "Asymmetric";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BudgetViolation: return "BudgetViolation";
    case ErrorCode::EmbeddingMismatch: return "EmbeddingMismatch";
    case ErrorCode::NonZeroDiagonal: return "NonZeroDiagonal";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::SingularD: return "SingularD";
    case ErrorCode::NonPositiveQmax: return "NonPositiveQmax";
    case ErrorCode::NotSPD: return "NotSPD";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::MissingReturns: return "MissingReturns";
    case ErrorCode::DegenerateReturns: return "DegenerateReturns";
    case ErrorCode::TangencyInfeasible: return "TangencyInfeasible";
    case ErrorCode::RiskBelowMVP: return "RiskBelowMVP";
    case ErrorCode::DegenerateRho: return "DegenerateRho";
    case ErrorCode::NegativeVariance: return "NegativeVariance";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::MdpUnbounded: return "MdpUnbounded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::NonMonotoneDates: return "NonMonotoneDates";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace drfrontier
