#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace steklov {

/// Failure classes. Precondition failures are caller mistakes (bad input,
/// exhausted configuration); numerical failures come from the solvers.
enum class ErrorKind { Precondition, Numerical };

/// Exception carrying a stable, machine-readable reason code such as
/// "cutoff_exhausted" or "degenerate_at_t".
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message)
        : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

inline Error precondition_error(std::string code, const std::string& message) {
    return Error(ErrorKind::Precondition, std::move(code), message);
}

inline Error numerical_error(std::string code, const std::string& message) {
    return Error(ErrorKind::Numerical, std::move(code), message);
}

}  // namespace steklov
