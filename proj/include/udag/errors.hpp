#pragma once

#include <stdexcept>
#include <string>

namespace udag {

// Invalid model parameters (d < 2, m > n, too few roots for drawing
// without replacement, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A well-formed configuration but an out-of-range argument to an operation.
class ArgumentError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Exhaustive enumeration refused because the configuration space is too big.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// A sampler variant that is not defined for the requested parameters.
class UnsupportedVariant : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed input file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace udag
