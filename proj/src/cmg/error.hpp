/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace cmg {

// Error category; mirrored one-to-one by the C API status codes.
enum class ErrorCode {
  kIo = 1,           // file missing, unreadable, or unwritable
  kParse = 2,        // malformed file content
  kInvalidArg = 3,   // bad parameter value
  kUnrepresentable = 4,  // geometry outside the representation's domain
  kDegenerate = 5,   // degenerate geometric input
  kInternal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cmg
