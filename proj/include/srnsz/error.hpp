#pragma once

#include <stdexcept>
#include <string>

namespace srnsz {

/// Base of every error raised by the codec. The CLI maps the subclasses
/// onto its exit-code contract, see ExitCode in tools/cli.hpp.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user configuration: stride not a power of two, e <= 0, bad flags.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside an operation's domain (empty grid, shape mismatch, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Input data rejected on the way in (non-finite values, wrong file size).
class IngestionError : public Error {
public:
    using Error::Error;
};

/// A compressed stream or artifact failed validation.
class CorruptStreamError : public Error {
public:
    using Error::Error;
};

/// Model bundle whose content hash does not verify.
class CorruptModelError : public Error {
public:
    using Error::Error;
};

/// Model bundle that parses but violates the graph/shape invariants.
class InvalidModelError : public Error {
public:
    using Error::Error;
};

/// Model bundle using a format version or layer tag this build does not know.
class ModelVersionError : public Error {
public:
    using Error::Error;
};

class ModelNotFoundError : public Error {
public:
    using Error::Error;
};

/// Caller broke a documented precondition (e.g. SR input smaller than 8x8).
class ContractError : public Error {
public:
    using Error::Error;
};

}  // namespace srnsz
