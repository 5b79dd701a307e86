#pragma once

#include <stdexcept>
#include <string>

namespace qsd {

/// Malformed input text (term lists, integral files, bit-string files).
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Structurally valid input that violates a contract (width mismatch,
/// index out of range, alphabet violation, ...).
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace qsd
