#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace repscore {

enum class ErrorCode {
    EmptySample,
    InvalidCount,
    InvalidWeight,
    DegenerateBenchmark,
    DimensionMismatch,
    UnknownAxis,
    InvalidDistribution,
    NoOverlap,
    SchemaError,
    DuplicateStratum,
    UnknownGeography,
    UnderivableDimension,
    RegistryIncomplete,
    RegistryMismatch,
    HarmonizationError,
    OutOfRange,
    OracleTooLarge,
    DivisionByZero,
    UnsupportedFormat,
    InvalidArgument,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace repscore
