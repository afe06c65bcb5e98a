#pragma once

#include <stdexcept>
#include <string>

namespace propspan {

/// Malformed or inconsistent input data (corpus files, annotation sets,
/// probability matrices). Maps to CLI exit code 2.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Chat endpoint unreachable or failure rate above the configured
/// threshold. Maps to CLI exit code 3.
class EndpointError : public std::runtime_error {
public:
  explicit EndpointError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace propspan
