#pragma once

#include <stdexcept>
#include <string>

namespace aralab {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (catalog, topology, config, trace, event log).
class ParseError : public Error {
public:
  using Error::Error;
};

/// Structurally valid input that violates a domain invariant.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Radio/link configuration outside what the platform supports.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace aralab
