#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pencil_lab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit the operation (non-square, mismatched sizes).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input violates a documented precondition (non-finite entries, wrong degree, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A regular pencil was required but the pencil is singular.
class SingularPencilError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// A coefficient expected to have a positive semidefinite Hermitian part does not.
class PoshRejection : public PreconditionError {
public:
    PoshRejection(std::string coefficient, double lambda_min, double tolerance);

    const std::string& coefficient() const noexcept { return coefficient_; }
    double lambda_min() const noexcept { return lambda_min_; }
    double tolerance() const noexcept { return tolerance_; }

private:
    std::string coefficient_;
    double lambda_min_;
    double tolerance_;
};

/// A rank decision could not be made with the configured gap threshold.
class NumericalAmbiguity : public Error {
public:
    NumericalAmbiguity(const std::string& what, std::vector<double> singular_values, double tolerance);

    const std::vector<double>& singular_values() const noexcept { return singular_values_; }
    double tolerance() const noexcept { return tolerance_; }

private:
    std::vector<double> singular_values_;
    double tolerance_;
};

}  // namespace pencil_lab
