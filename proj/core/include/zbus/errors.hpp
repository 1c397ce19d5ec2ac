#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zbus {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent network, load, or feeder description.
class InputError : public Error {
  public:
    using Error::Error;
};

/// A pivot fell below the relative singularity tolerance during LU.
class SingularMatrixError : public Error {
  public:
    SingularMatrixError(std::string const& what, std::size_t column)
        : Error(what), column_(column) {}
    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t column_;
};

/// Y + Y_L could not be inverted.
class IllPosedNetworkError : public Error {
  public:
    using Error::Error;
};

/// A loaded phase (or phase pair) sees a voltage too close to zero.
class SingularVoltageError : public Error {
  public:
    SingularVoltageError(std::string const& what, std::string node, std::string location)
        : Error(what), node_(std::move(node)), location_(std::move(location)) {}
    std::string const& node() const noexcept { return node_; }
    /// Phase ("a") or phase pair ("ab") that carried the load.
    std::string const& location() const noexcept { return location_; }

  private:
    std::string node_;
    std::string location_;
};

/// The certificate quantities involve division by a zero no-load voltage.
class CertificateUndefinedError : public Error {
  public:
    using Error::Error;
};

}  // namespace zbus
