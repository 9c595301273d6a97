#pragma once

#include <stdexcept>
#include <string>

namespace cvlambda {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    /// Short machine-readable category, e.g. "SingularSystem".
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// M1 is too ill-conditioned to invert at this parameter point.
class SingularSystem : public Error {
public:
    explicit SingularSystem(const std::string& what) : Error("SingularSystem", what) {}
};

/// The adaptive integrator could not make progress.
class IntegrationFailure : public Error {
public:
    explicit IntegrationFailure(const std::string& what) : Error("IntegrationFailure", what) {}
};

/// A correlation matrix produced a DGCZ value below zero.
class NonPhysical : public Error {
public:
    explicit NonPhysical(const std::string& what) : Error("NonPhysical", what) {}
};

/// Arguments outside the domain of a closed-form approximation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("DomainError", what) {}
};

class InvalidParams : public Error {
public:
    explicit InvalidParams(const std::string& what) : Error("InvalidParams", what) {}
};

class NoImprovement : public Error {
public:
    explicit NoImprovement(const std::string& what) : Error("NoImprovement", what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("ConfigError", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("IoError", what) {}
};

}  // namespace cvlambda
