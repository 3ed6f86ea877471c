#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace conefrac {

enum class ErrorCode {
    DimensionMismatch,
    SingularShift,
    DefectiveMatrix,
    SpectrumNotSectorial,
    QuadratureNotConverged,
    KernelPoleOnPath,
    DecayViolated,
    ContourHitsSpectrum,
    EmptyWindow,
    GridTooCoarse,
    UnsupportedSmoothness,
    WindowEmpty,
    ShiftTooLarge,
    SolveFailed,
    NonPositiveState,
    PreconditionViolated,
    InvalidArgument,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors caused by bad input or configuration rather than by a
/// numerical breakdown. The CLI maps these to exit code 2, the rest to 3.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

} // namespace conefrac
