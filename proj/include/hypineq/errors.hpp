#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hypineq {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a formula (e.g. a point on the unit sphere).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Parameters violate one or more constraints of an inequality.
class AdmissibilityError : public Error {
public:
    explicit AdmissibilityError(std::vector<std::string> violated)
        : Error(format(violated)), violated_(std::move(violated)) {}

    AdmissibilityError(const std::string& message, std::vector<std::string> violated)
        : Error(message), violated_(std::move(violated)) {}

    const std::vector<std::string>& violated() const noexcept { return violated_; }

private:
    static std::string format(const std::vector<std::string>& v) {
        std::string msg = "inadmissible parameters; violated:";
        for (const auto& c : v) msg += " \"" + c + "\"";
        return msg;
    }

    std::vector<std::string> violated_;
};

/// Base of numeric failures (exit code 4 in the CLI).
class NumericError : public Error {
public:
    using Error::Error;
};

/// An infinite-domain integral whose integrand grows exponentially.
class DivergentTail : public NumericError {
public:
    using NumericError::NumericError;
};

/// Adaptive integration or an iteration gave up; carries the best estimate.
class NonConvergence : public NumericError {
public:
    NonConvergence(const std::string& what, double best_estimate, double error_estimate)
        : NumericError(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double best_estimate_;
    double error_estimate_;
};

/// Profile support touches the singular set of an extra weight (d = R).
class BoundaryWeightSingularity : public NumericError {
public:
    using NumericError::NumericError;
};

/// Matrix assembly produced a form that is not symmetric positive definite.
class AssemblyError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Syntax error in an expression or a document, with 1-based position.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          message_(what), line_(line), column_(column) {}

    /// The description without the position suffix.
    const std::string& message() const noexcept { return message_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::string message_;
    std::size_t line_;
    std::size_t column_;
};

/// Invalid specification content (unknown symbol, unknown integrand kind, ...).
class SpecError : public Error {
public:
    using Error::Error;
};

}  // namespace hypineq
