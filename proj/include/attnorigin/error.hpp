// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#pragma once

#include <stdexcept>
#include <string>

namespace attnorigin {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument or shape precondition violated by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (JSON schema, corpus line, weights).
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace attnorigin
