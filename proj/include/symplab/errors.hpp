#pragma once

#include <stdexcept>
#include <string>

namespace symplab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// A matrix that should be symplectic is not, within the active tolerance.
class SymplecticError : public Error {
public:
    using Error::Error;
};

/// Accumulated products drifted off the symplectic group beyond the drift bound.
class DriftError : public Error {
public:
    using Error::Error;
};

class NotConverged : public Error {
public:
    using Error::Error;
};

class DegenerateError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NotOnLeaf : public Error {
public:
    using Error::Error;
};

/// Perturbation cylinder does not isolate the requested site from the guard orbits.
class SeparationFailure : public Error {
public:
    using Error::Error;
};

/// Raised by pipelines; carries the label of the stage that failed.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

} // namespace symplab
