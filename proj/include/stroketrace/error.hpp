#ifndef STROKETRACE_ERROR_HPP
#define STROKETRACE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace stroketrace {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable, unwritable or missing file.
class IoError : public Error {
public:
    using Error::Error;
};

/// Bytes that do not decode as a supported image or document format.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A well-formed document or value that violates a schema or invariant.
/// `field()` names the offending field or invariant.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message)
        : Error(message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// No foreground runs to estimate a width from.
class EmptySignature : public Error {
public:
    EmptySignature() : Error("signature has no foreground pixels") {}
};

} // namespace stroketrace

#endif
