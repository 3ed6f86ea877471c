#include "conefrac/error.hpp"

namespace conefrac {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularShift: return "SingularShift";
    case ErrorCode::DefectiveMatrix: return "DefectiveMatrix";
    case ErrorCode::SpectrumNotSectorial: return "SpectrumNotSectorial";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::KernelPoleOnPath: return "KernelPoleOnPath";
    case ErrorCode::DecayViolated: return "DecayViolated";
    case ErrorCode::ContourHitsSpectrum: return "ContourHitsSpectrum";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::UnsupportedSmoothness: return "UnsupportedSmoothness";
    case ErrorCode::WindowEmpty: return "WindowEmpty";
    case ErrorCode::ShiftTooLarge: return "ShiftTooLarge";
    case ErrorCode::SolveFailed: return "SolveFailed";
    case ErrorCode::NonPositiveState: return "NonPositiveState";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::EmptyWindow:
    case ErrorCode::UnsupportedSmoothness:
    case ErrorCode::ShiftTooLarge:
    case ErrorCode::PreconditionViolated:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ConfigError:
    case ErrorCode::IoError:
    case ErrorCode::DimensionMismatch:
        return true;
    default:
        return false;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

} // namespace conefrac
