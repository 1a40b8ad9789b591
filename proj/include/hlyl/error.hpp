#pragma once

#include <stdexcept>
#include <string>

namespace hlyl {

// Numeric values are part of the C ABI (see hlyl.h); append only.
enum class ErrorCode : int {
    invalid_argument = 1,
    domain_error = 2,
    parse_error = 3,
    io_error = 4,
    undefined_fraction = 5,
    age_mismatch = 6,
    degenerate = 7,
};

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &what) : std::runtime_error(what), code_{code} {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &what) { throw Error(code, what); }

} // namespace hlyl
