#include "repscore/error.hpp"

namespace repscore {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::InvalidCount: return "InvalidCount";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::DegenerateBenchmark: return "DegenerateBenchmark";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownAxis: return "UnknownAxis";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DuplicateStratum: return "DuplicateStratum";
    case ErrorCode::UnknownGeography: return "UnknownGeography";
    case ErrorCode::UnderivableDimension: return "UnderivableDimension";
    case ErrorCode::RegistryIncomplete: return "RegistryIncomplete";
    case ErrorCode::RegistryMismatch: return "RegistryMismatch";
    case ErrorCode::HarmonizationError: return "HarmonizationError";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::OracleTooLarge: return "OracleTooLarge";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace repscore
