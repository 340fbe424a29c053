#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pnm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `position` is a byte offset into the parsed text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at offset " + std::to_string(position) + ")"), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// An operation was called on inputs that violate its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An axiom does not decompose as a Σd-simple formula.
class NotSimpleError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// A configured resource cap (universe size, node count) was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace pnm
