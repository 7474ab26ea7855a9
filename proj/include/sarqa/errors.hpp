#ifndef SARQA_ERRORS_HPP
#define SARQA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sarqa {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file (bad header, truncated payload, non-finite values).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Filesystem-level failure (cannot open, short write).
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Invalid parameter or domain violation.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Raised when area selection finds no textureless window; the score is
/// undefined in that case and callers must surface it distinctly.
class NoTexturelessArea : public Error {
public:
    explicit NoTexturelessArea(const std::string& msg) : Error(msg) {}
};

} // namespace sarqa

#endif
