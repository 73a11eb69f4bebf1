// Copyright 2026 The cokrig Authors
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

namespace cokrig {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: shapes, parameter ranges, files. Maps to CLI exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InputError {
 public:
  using InputError::InputError;
};

class InvalidArgument : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

/// A design point of level `level` (1-based) has no match in level - 1.
class NotNested : public InputError {
 public:
  NotNested(int level, std::string point)
      : InputError("design of level " + std::to_string(level) +
                   " is not contained in level " + std::to_string(level - 1) +
                   ": point " + point + " has no match"),
        level_(level),
        point_(std::move(point)) {}
  int level() const { return level_; }
  const std::string& point() const { return point_; }

 private:
  int level_;
  std::string point_;
};

class DuplicatePoint : public InputError {
 public:
  using InputError::InputError;
};

/// Too few observations for the number of regression coefficients.
class InsufficientData : public InputError {
 public:
  using InputError::InputError;
};

/// Numerical failure. Maps to CLI exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Correlation matrix could not be factored even with the largest nugget.
class StillSingular : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Collinear regressors: H^T R^-1 H is singular.
class SingularTrend : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Warnings go to stderr unless silenced (tests and benchmarks silence them).
void warn(const std::string& message);
void set_warnings_enabled(bool enabled);

}  // namespace cokrig
