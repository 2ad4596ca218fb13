#pragma once

#include <stdexcept>
#include <string>

namespace genremap {

// Raised for bad input data, malformed files and violated preconditions.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised for malformed command lines and configuration files.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what) {}
};

}  // namespace genremap
