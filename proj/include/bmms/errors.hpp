#pragma once

#include <stdexcept>
#include <string>

namespace bmms {

// Error taxonomy shared by the library. The CLI maps these onto exit codes:
// usage/config -> 1, missing input -> 2, numerical failure -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidDimension : Error {
  using Error::Error;
};

struct InvalidConfig : Error {
  using Error::Error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct InvalidPartition : Error {
  using Error::Error;
};

struct IncompleteChain : Error {
  using Error::Error;
};

struct NumericalSingularity : Error {
  using Error::Error;
};

struct MissingInput : Error {
  explicit MissingInput(const std::string& path)
      : Error("missing input: " + path), path(path) {}
  std::string path;
};

struct ParseError : Error {
  ParseError(const std::string& what, const std::string& file, long line)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file(file),
        line(line) {}
  std::string file;
  long line = 0;
};

}  // namespace bmms
