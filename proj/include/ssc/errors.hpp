#pragma once

#include <stdexcept>
#include <string>

namespace ssc {

/// Error families raised by the library. The CLI maps each family to a
/// documented exit code; library users can switch on the code directly.
enum class ErrorCode {
    // panel validation
    MissingCell,
    DuplicateCell,
    NonAbsorbing,
    NoPrePeriod,
    NoTreatedUnit,
    ParseError,
    // parameter / hypothesis construction
    EmptyEventTime,
    EmptyGroup,
    OverlappingGroups,
    DimensionMismatch,
    // estimation
    NotInvertible,
    // inference
    WindowTooShort,
    InfeasibleLevel,
    GridError,
    // simulation
    InvalidDGP,
    InvalidPlan,
    // io / configuration
    InvalidConfig,
    InvalidInput,
    IoError,
    MissingFit,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace ssc
