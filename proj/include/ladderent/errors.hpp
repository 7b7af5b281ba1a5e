#pragma once

#include <stdexcept>
#include <string>

namespace ladderent {

/// Error categories map onto CLI exit reporting: every thrown error carries
/// one of these so the tool can emit a machine-readable failure record.
enum class ErrorCategory { Domain, Resource, Convergence, Construction };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const { return category_; }

private:
    ErrorCategory category_;
};

/// Invalid inputs: bad geometry parameters, out-of-range sites, odd qubit
/// counts where a half-filled sector is required, etc.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(ErrorCategory::Domain, msg) {}
};

/// Requests that are well-formed but exceed what dense / full-enumeration
/// methods can handle (e.g. full bipartition sweeps past 16 spins).
class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& msg) : Error(ErrorCategory::Resource, msg) {}
};

/// Iterative solver failed to reach its tolerance; carries the best residual.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double best_residual)
        : Error(ErrorCategory::Convergence, msg), best_residual_(best_residual) {}
    double best_residual() const { return best_residual_; }

private:
    double best_residual_ = 0.0;
};

/// State construction failed (e.g. a lattice with no dimer covering).
class ConstructionError : public Error {
public:
    explicit ConstructionError(const std::string& msg)
        : Error(ErrorCategory::Construction, msg) {}
};

inline const char* to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Domain: return "domain";
        case ErrorCategory::Resource: return "resource";
        case ErrorCategory::Convergence: return "convergence";
        case ErrorCategory::Construction: return "construction";
    }
    return "unknown";
}

}  // namespace ladderent
