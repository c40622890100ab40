#pragma once

#include <stdexcept>
#include <string>

namespace cloaksim {

// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Coupled-oscillator determinant vanishes on the evaluation grid.
class SingularityError : public Error {
public:
    using Error::Error;
};

// No resolvable feature / peak in the input data.
class DetectionError : public Error {
public:
    using Error::Error;
};

// Requested integrator step exceeds the accuracy bound.
class AccuracyError : public Error {
public:
    using Error::Error;
};

// Frequency grid too narrow for the requested spectrum.
class CoverageError : public Error {
public:
    using Error::Error;
};

// Line or PSF under-resolved by the sampling grid.
class SamplingError : public Error {
public:
    using Error::Error;
};

// Too few usable inputs survived a selection step.
class InsufficiencyError : public Error {
public:
    using Error::Error;
};

// Non-finite model or residual evaluation.
class EvaluationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace cloaksim
