#pragma once

#include <stdexcept>
#include <string>

namespace vinegof {

// Argument or parameter outside its admissible domain.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// An iterative routine failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation produced a non-finite or otherwise unusable value.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A matrix required to be invertible is (numerically) singular.
class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

// Too many replications of a Monte Carlo study failed.
class StudyError : public std::runtime_error {
public:
    explicit StudyError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (model JSON, data CSV, study config).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace vinegof
