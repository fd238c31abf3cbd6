#pragma once

#include <stdexcept>
#include <string>

namespace peridyn {

enum class ErrorCode {
    InvalidArgument = 1,  // malformed input (non-unit normal, bad orders, unknown names)
    Domain = 2,           // point outside the region an operation is defined on
    NonFinite = 3,        // integrand or field produced NaN/Inf
    Config = 4,           // study configuration rejected
    Io = 5,
    Singular = 6,         // linear system could not be factorized reliably
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace peridyn
