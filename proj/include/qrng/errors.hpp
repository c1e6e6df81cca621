#pragma once

#include <stdexcept>
#include <string>

namespace qrng {

/// Coarse failure class; the CLI maps each one to its exit code.
enum class ErrorKind { Validation, Numeric, Io };

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

/// Argument outside the mathematical domain of an operation (mu <= 0, eta > 1, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

/// Bit sequence too short (or block larger than the data) for a requested test.
struct InsufficientDataError : Error {
    explicit InsufficientDataError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

/// Fock-space truncation failed to capture the required probability mass,
/// or the photon-number bound exceeds what the amplitude tables support.
struct TruncationError : Error {
    TruncationError(const std::string& what, unsigned bound)
        : Error(ErrorKind::Numeric, what), bound_(bound) {}
    unsigned bound() const noexcept { return bound_; }

  private:
    unsigned bound_;
};

/// A ratio or optimisation whose inputs underflow or violate its precondition.
struct RangeError : Error {
    explicit RangeError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

struct ResourceError : Error {
    explicit ResourceError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

struct FormatError : Error {
    explicit FormatError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace qrng
