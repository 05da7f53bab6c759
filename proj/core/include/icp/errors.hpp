#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace icp {

enum class ErrorCode {
    NonSimpleGraph,
    InconsistentIncidence,
    EulerMismatch,
    UnsupportedParameters,
    UnknownVertex,
    MissingAngle,
    BoundaryVertex,
    NotTorus,
    C1Violated,
    RangeViolated,
    DomainError,
    InconsistentHolonomy,
    NotInsideDisk,
    IoError,
    ParseError,
    TooShort,
    EmptyInterior,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::NonSimpleGraph: return "NonSimpleGraph";
    case ErrorCode::InconsistentIncidence: return "InconsistentIncidence";
    case ErrorCode::EulerMismatch: return "EulerMismatch";
    case ErrorCode::UnsupportedParameters: return "UnsupportedParameters";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::MissingAngle: return "MissingAngle";
    case ErrorCode::BoundaryVertex: return "BoundaryVertex";
    case ErrorCode::NotTorus: return "NotTorus";
    case ErrorCode::C1Violated: return "C1Violated";
    case ErrorCode::RangeViolated: return "RangeViolated";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InconsistentHolonomy: return "InconsistentHolonomy";
    case ErrorCode::NotInsideDisk: return "NotInsideDisk";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    }
    return "Unknown";
}

}  // namespace icp
