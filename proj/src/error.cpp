#include "cmt/error.hpp"

namespace cmt {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidDateOrder: return "InvalidDateOrder";
        case ErrorCode::ExtrapolationNotAllowed: return "ExtrapolationNotAllowed";
        case ErrorCode::InvalidInterval: return "InvalidInterval";
        case ErrorCode::InvalidTenor: return "InvalidTenor";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::NegativeHazardImplied: return "NegativeHazardImplied";
        case ErrorCode::StrippingFailed: return "StrippingFailed";
        case ErrorCode::InversionRangeError: return "InversionRangeError";
        case ErrorCode::ConvergenceError: return "ConvergenceError";
        case ErrorCode::DegenerateCurve: return "DegenerateCurve";
        case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
        case ErrorCode::DegenerateBond: return "DegenerateBond";
        case ErrorCode::DegenerateYield: return "DegenerateYield";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::NoArbitrageViolation: return "NoArbitrageViolation";
    }
    return "UnknownError";
}

bool is_validation_error(ErrorCode code) noexcept {
    return static_cast<int>(code) < 20;
}

}  // namespace cmt
