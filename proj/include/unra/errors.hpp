#pragma once

#include <stdexcept>
#include <string>

namespace unra {

// Malformed input file. The message names the file and the 1-based line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that parses but violates a structural invariant of the network.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reference to a token, node or document that does not exist.
class UnknownTokenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace unra
