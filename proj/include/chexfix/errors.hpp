#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chexfix {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidGeometry : public Error {
public:
    using Error::Error;
};

class ExtractionError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class IngestError : public Error {
public:
    IngestError(const std::string& message, std::size_t line = 0)
        : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UnsupportedQuery : public Error {
public:
    using Error::Error;
};

class PlanError : public Error {
public:
    using Error::Error;
};

class BackendUnavailable : public Error {
public:
    using Error::Error;
};

class ProtocolViolation : public Error {
public:
    using Error::Error;
};

class ConsistencyError : public Error {
public:
    using Error::Error;
};

class AnnotationError : public Error {
public:
    using Error::Error;
};

class CompositeUndefined : public Error {
public:
    using Error::Error;
};

class ImprovementUndefined : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace chexfix
