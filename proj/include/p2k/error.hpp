#pragma once

#include <stdexcept>
#include <string>

namespace p2k {

// Base for every domain failure raised by the library. The CLI maps these to
// exit code 1; anything else escaping is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Input lies outside what the compiled-in tables or oracle budgets support.
class UnsupportedRange : public Error {
 public:
  using Error::Error;
};

class Overflow : public Error {
 public:
  using Error::Error;
};

}  // namespace p2k
