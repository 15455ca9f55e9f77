#pragma once

#include <stdexcept>
#include <string>

namespace mstool {

// Base for every error raised by the toolkit. The CLI surfaces what() verbatim.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input passed validation syntactically but is numerically degenerate
// (zero variance, all-zero GFP, empty cluster set, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file content. Carries the location when one is known.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace mstool
