// Copyright 2026 The scengen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCENGEN_ERROR_HPP_
#define SCENGEN_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace scengen {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Positioned syntax error. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        detail_(message) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

/// A DSL statement carries the wrong number of parameters for its kind.
class ArityError : public ParseError {
 public:
  using ParseError::ParseError;
};

class OutOfRange : public Error {
 public:
  OutOfRange(std::size_t slot, double value, const std::string& message)
      : Error("slot " + std::to_string(slot) + ": " + message), slot_(slot), value_(value) {}
  std::size_t slot() const { return slot_; }
  double value() const { return value_; }

 private:
  std::size_t slot_;
  double value_;
};

class InvalidTestCase : public Error {
 public:
  using Error::Error;
};

class EmptyReport : public Error {
 public:
  EmptyReport() : Error("accident report is empty") {}
};

class IllegalIps : public Error {
 public:
  using Error::Error;
};

/// Retry loop exhausted without a response passing its validity gate.
class RetryExhausted : public Error {
 public:
  RetryExhausted(const std::string& what, int attempts, std::vector<std::string> last_violations)
      : Error(what + " failed after " + std::to_string(attempts) + " attempt(s)"),
        attempts_(attempts),
        last_violations_(std::move(last_violations)) {}
  int attempts() const { return attempts_; }
  const std::vector<std::string>& last_violations() const { return last_violations_; }

 private:
  int attempts_;
  std::vector<std::string> last_violations_;
};

class ExtractionFailed : public RetryExhausted {
 public:
  ExtractionFailed(int attempts, std::vector<std::string> last)
      : RetryExhausted("IPS extraction", attempts, std::move(last)) {}
};

class ConversionFailed : public RetryExhausted {
 public:
  ConversionFailed(int attempts, std::vector<std::string> last)
      : RetryExhausted("template conversion", attempts, std::move(last)) {}
};

/// Replay of a prompt whose digest is not in the transcript.
class ReplayMiss : public Error {
 public:
  explicit ReplayMiss(const std::string& digest)
      : Error("no transcript entry for prompt digest " + digest), digest_(digest) {}
  const std::string& digest() const { return digest_; }

 private:
  std::string digest_;
};

class LlmTransportError : public Error {
 public:
  using Error::Error;
};

class MissingDefault : public Error {
 public:
  using Error::Error;
};

class UnknownEgo : public Error {
 public:
  using Error::Error;
};

class NoNpc : public Error {
 public:
  NoNpc() : Error("trace contains no NPC vehicle") {}
};

class TraceTooShort : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SamplingExhausted : public Error {
 public:
  using Error::Error;
};

class MutationExhausted : public Error {
 public:
  using Error::Error;
};

class NotCritical : public Error {
 public:
  NotCritical() : Error("case has no collision") {}
};

class EmptyHistory : public Error {
 public:
  EmptyHistory() : Error("no repetition history supplied") {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An input file is missing or unreadable.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace scengen

#endif  // SCENGEN_ERROR_HPP_
