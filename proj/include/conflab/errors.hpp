#pragma once

#include <stdexcept>
#include <string>

namespace conflab {

/// Error categories, one per CLI exit code.
///
/// Config      -> exit 2: malformed or inconsistent input
/// Unsupported -> exit 3: the request falls outside the sufficient
///                conditions any construction covers; the message names
///                the missing hypothesis
/// Numerical   -> exit 4: a solver failed (non-convergence, indefinite
///                system, positivity loss, verification failure)
enum class ErrorKind { Config, Unsupported, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

    int exit_code() const {
        switch (kind_) {
        case ErrorKind::Config: return 2;
        case ErrorKind::Unsupported: return 3;
        case ErrorKind::Numerical: return 4;
        }
        return 4;
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_config(const std::string& msg) {
    throw Error(ErrorKind::Config, msg);
}

[[noreturn]] inline void fail_unsupported(const std::string& msg) {
    throw Error(ErrorKind::Unsupported, msg);
}

[[noreturn]] inline void fail_numerical(const std::string& msg) {
    throw Error(ErrorKind::Numerical, msg);
}

}  // namespace conflab
