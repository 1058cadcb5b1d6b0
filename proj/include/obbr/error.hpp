#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace obbr {

/// Root of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A record could not be parsed. `line()` is 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Transport failed (connection refused, timeout, 5xx, 429). Retryable.
class DeliveryError : public Error {
public:
    using Error::Error;
};

/// The endpoint answered but the answer is unusable (4xx, malformed body).
/// Not retried.
class EndpointError : public Error {
public:
    using Error::Error;
};

/// A sample could not be rewritten. Carries the id of the source sample.
class RewriteError : public Error {
public:
    RewriteError(std::string lineage_id, const std::string& what)
        : Error(lineage_id + ": " + what), lineage_id_(std::move(lineage_id)) {}
    const std::string& lineage_id() const noexcept { return lineage_id_; }

private:
    std::string lineage_id_;
};

class DegenerateModelError : public Error {
public:
    using Error::Error;
};

class EnumerationCapError : public Error {
public:
    using Error::Error;
};

} // namespace obbr
