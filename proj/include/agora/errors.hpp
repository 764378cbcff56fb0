#pragma once

#include <stdexcept>
#include <string>

namespace agora {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape mismatches (non-square matrix, vector length disagreement).
class DimensionError : public Error {
public:
    using Error::Error;
};

// A precondition on caller-supplied data was violated.
class InputError : public Error {
public:
    using Error::Error;
};

// Scenario/manifest files that do not parse or do not validate.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A modelling assumption required by the analysis does not hold
// (e.g. the scenario is not globally learnable).
class AssumptionError : public Error {
public:
    using Error::Error;
};

// A referenced file or trace directory does not exist.
class MissingInputError : public Error {
public:
    using Error::Error;
};

// Solver breakdowns: non-convergence, singular matrices, degenerate graphs.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace agora
