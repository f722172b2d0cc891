#pragma once

#include <stdexcept>
#include <string>

namespace feop {

/// Malformed text input; carries the 1-based line number of the bad line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(const std::string& msg)
        : std::runtime_error(msg) {}
};

/// Iterative solve did not reach tolerance; carries the last residual norm.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& msg, double last_residual)
        : std::runtime_error(msg), last_residual_(last_residual) {}
    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// PDE coefficient violated a validity requirement (e.g. a(x) <= 0).
class CoefficientError : public std::runtime_error {
public:
    explicit CoefficientError(const std::string& msg)
        : std::runtime_error(msg) {}
};

/// Non-finite value reached a place that must stay finite (loss, gradient).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace feop
