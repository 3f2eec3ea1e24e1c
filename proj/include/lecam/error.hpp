#pragma once

#include <stdexcept>
#include <string>

namespace lecam {

enum class ErrorKind {
    InvalidArgument,
    Quadrature,
    RootFinding,
    BandViolation,
    Divergence,
    Degenerate,
};

/// Every failure raised by the library. `kind()` lets callers (the CLI in
/// particular) map failures to exit codes without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace lecam
