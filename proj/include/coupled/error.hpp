#pragma once

#include <stdexcept>
#include <string>

namespace coupled {

// Failure categories. The CLI maps each to its own exit code.
enum class ErrorCategory { domain = 1, parse = 2, fit = 3, io = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

// Argument outside the domain of a deformed operation, or a numeric singularity.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

// Malformed input file. Line and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(ErrorCategory::parse, what), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class FitError : public Error {
public:
    explicit FitError(const std::string& what) : Error(ErrorCategory::fit, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace coupled
