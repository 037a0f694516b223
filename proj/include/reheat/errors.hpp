#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reheat {

enum class ErrorCode {
    Parameter,
    Domain,
    Unsupported,
    Numerical,
    InsufficientData,
    DimensionMismatch,
    Io,
    Config,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Parameter: return "parameter_error";
        case ErrorCode::Domain: return "domain_error";
        case ErrorCode::Unsupported: return "unsupported_combination";
        case ErrorCode::Numerical: return "numerical_error";
        case ErrorCode::InsufficientData: return "insufficient_data";
        case ErrorCode::DimensionMismatch: return "dimension_mismatch";
        case ErrorCode::Io: return "io_error";
        case ErrorCode::Config: return "config_error";
    }
    return "unknown_error";
}

/// Single exception type for the library; the code is what the CLI reports.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

}  // namespace reheat
