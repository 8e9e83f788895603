#pragma once

#include <stdexcept>
#include <string>

namespace spdc {

// Invalid parameters, malformed configuration or data that fails a precondition.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Measured counts that cannot be inverted (e.g. no excess coincidences).
class EstimationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Quadrature or root finding that did not reach the requested tolerance.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    explicit NumericalError(const std::string& what)
        : NumericalError(what, 0.0) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace spdc
