#pragma once

#include <stdexcept>
#include <string>

namespace arsel {

/// Invalid configuration or argument. `field()` names the offending input.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A covariance matrix failed to factor. Carries the smallest pivot seen.
class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(const std::string& message, double pivot)
        : std::runtime_error(message + " (smallest pivot " + std::to_string(pivot) + ")"),
          pivot_(pivot) {}

    double pivot() const noexcept { return pivot_; }

private:
    double pivot_;
};

/// Input sequence shorter than the operation needs.
class LengthError : public std::length_error {
public:
    LengthError(const std::string& what_for, std::size_t required, std::size_t got)
        : std::length_error(what_for + ": need length " + std::to_string(required) + ", got " +
                            std::to_string(got)),
          required_(required) {}

    std::size_t required() const noexcept { return required_; }

private:
    std::size_t required_;
};

}  // namespace arsel
