#pragma once

#include <stdexcept>
#include <string>

namespace polygon_gpt {

/// Raised when a caller passes a parameter outside the supported domain.
class InvalidParameter : public std::invalid_argument {
public:
  explicit InvalidParameter(const std::string &what) : std::invalid_argument(what) {}
};

/// Raised for inputs the construction is not defined for (e.g. parity-restricted operations).
class Unsupported : public std::domain_error {
public:
  explicit Unsupported(const std::string &what) : std::domain_error(what) {}
};

/// A computed result contradicts a structural invariant (broken tolerance, transcription or solver error).
class InternalInconsistency : public std::logic_error {
public:
  explicit InternalInconsistency(const std::string &what) : std::logic_error(what) {}
};

} // namespace polygon_gpt
