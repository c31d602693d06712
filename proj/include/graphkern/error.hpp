#pragma once

#include <stdexcept>
#include <string>

namespace graphkern {

/// Broad failure classes; the command-line tool maps them onto exit codes.
enum class ErrorKind { config, data, compute };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Inconsistent or unsupported parameters.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Malformed input files, invalid graphs, datasets unusable for the request.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Numerical failures: count overflow, size guards, solver trouble.
class ComputeError : public Error {
public:
    explicit ComputeError(const std::string& what) : Error(ErrorKind::compute, what) {}
};

/// Raised by the exhaustive enumerators when the configured path cap is hit.
class SizeGuardError : public ComputeError {
public:
    explicit SizeGuardError(const std::string& what) : ComputeError(what) {}
};

inline int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::config: return 2;
        case ErrorKind::data: return 3;
        case ErrorKind::compute: return 4;
    }
    return 4;
}

} // namespace graphkern
