#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cqnc {

enum class ErrorCode {
    invalid_parameter,
    non_finite,
    singular_at_omega,
    unstable_system,
    delta_zero,
    config,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::invalid_parameter: return "INVALID_PARAMETER";
    case ErrorCode::non_finite: return "NON_FINITE";
    case ErrorCode::singular_at_omega: return "SINGULAR_AT_OMEGA";
    case ErrorCode::unstable_system: return "UNSTABLE_SYSTEM";
    case ErrorCode::delta_zero: return "DELTA_ZERO";
    case ErrorCode::config: return "CONFIG_ERROR";
    }
    return "UNKNOWN";
}

// Hard failure raised by the engines. Advisory findings use Diagnostic instead.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace cqnc
