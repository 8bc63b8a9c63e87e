/*
 * Copyright 2026 The DLCM Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DLCM_ERROR_H_
#define DLCM_ERROR_H_

#include <stdexcept>
#include <string>

namespace dlcm {

// Base of every error raised by the library. The CLI maps subclasses onto
// process exit codes (see tools/dlcm_main.cc).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes are incompatible for the requested operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A precondition of an API call was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A score file does not cover the query/document set exactly once.
class CoverageError : public Error {
 public:
  using Error::Error;
};

// Unreadable or unwritable path.
class IoError : public Error {
 public:
  using Error::Error;
};

// Model/data configuration mismatch (e.g. checkpoint dims vs. data).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Training cannot start from the given data.
class TrainingError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf produced during forward, backward or training.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace dlcm

#endif  // DLCM_ERROR_H_
