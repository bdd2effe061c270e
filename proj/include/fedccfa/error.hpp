#pragma once

#include <stdexcept>
#include <string>

namespace fedccfa {

// Base for every error raised by the library. The C API maps each subclass
// onto a distinct status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape or precondition violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

// Invalid or inconsistent experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Dataset content cannot satisfy a request (malformed file, deficient class).
class DataError : public Error {
public:
    using Error::Error;
};

// Cosine similarity against a zero-norm anchor.
class DegenerateSimilarityError : public Error {
public:
    using Error::Error;
};

// A runtime invariant broke during simulation (non-finite parameters, ...).
class InvariantError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace fedccfa
