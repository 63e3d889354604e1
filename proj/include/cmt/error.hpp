#pragma once

#include <stdexcept>
#include <string>

namespace cmt {

/// Failure categories raised by the pricing library. Values are stable and
/// mirrored one-to-one by the C API status codes.
enum class ErrorCode : int {
    InvalidArgument = 1,
    ParseError = 2,
    IoError = 3,
    InvalidDateOrder = 4,
    ExtrapolationNotAllowed = 5,
    InvalidInterval = 6,
    InvalidTenor = 7,
    DomainError = 8,
    NegativeHazardImplied = 20,
    StrippingFailed = 21,
    InversionRangeError = 22,
    ConvergenceError = 23,
    DegenerateCurve = 24,
    DegenerateDenominator = 25,
    DegenerateBond = 26,
    DegenerateYield = 27,
    InsufficientSamples = 28,
    NoArbitrageViolation = 29,
};

const char* to_string(ErrorCode code) noexcept;

/// True for codes that signal bad inputs rather than a numerical failure.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define CMT_REQUIRE(cond, code, msg)                        \
    do {                                                    \
        if (!(cond)) throw ::cmt::Error((code), (msg));     \
    } while (false)

}  // namespace cmt
