// Copyright 2026 The nestvqa Authors
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

#pragma once

#include <stdexcept>
#include <string>

/**
 * Exception hierarchy for nestvqa.
 *
 * Every failure raised by the library derives from nest::Error so callers can
 * catch one type at the boundary (the CLI maps subclasses onto exit codes).
 */

namespace nest {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (JSON, edge lists, Hamiltonian or graph files).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A parsed value violates a domain invariant. `field()` names the offender.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class InvalidShape : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class NoFeasibleMap : public Error {
 public:
  using Error::Error;
};

class EmptyCandidates : public Error {
 public:
  using Error::Error;
};

class AllocationFailure : public Error {
 public:
  AllocationFailure(int job, const std::string& what)
      : Error(what), job_(job) {}
  int job() const noexcept { return job_; }

 private:
  int job_;
};

class UnmappedQubit : public Error {
 public:
  using Error::Error;
};

class MissingEdgeProps : public Error {
 public:
  using Error::Error;
};

class UnroutableGate : public Error {
 public:
  using Error::Error;
};

class InvalidArity : public Error {
 public:
  using Error::Error;
};

class EmptyGraph : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class TooManyQubits : public Error {
 public:
  using Error::Error;
};

class ParamLengthMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidBudget : public Error {
 public:
  using Error::Error;
};

class ObjectiveFailure : public Error {
 public:
  using Error::Error;
};

class TooLargeForExact : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  using Error::Error;
};

/// Experiment/suite configuration problems detected before any work starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nest
