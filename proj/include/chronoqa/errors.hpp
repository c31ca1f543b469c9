#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace chronoqa {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
    ok = 0,
    usage = 1,
    validation = 2,
    numerical = 3,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept { return ExitCode::validation; }
};

class UsageError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::usage; }
};

/// A schema or invariant violation in user-supplied data or configuration.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed input at a known location (file and 1-based line).
class ParseError : public ValidationError {
public:
    ParseError(std::string file, std::size_t line, const std::string& what)
        : ValidationError(file + ":" + std::to_string(line) + ": " + what),
          file_(std::move(file)), line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// The corpus specification cannot be satisfied.
class InfeasibleSpecError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Non-finite values reached the training loop.
class NumericalError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::numerical; }
};

/// No contrastive question exists for a sample (its answer never changes).
class TransformUnavailable : public Error {
public:
    using Error::Error;
};

}  // namespace chronoqa
