/* Copyright 2026 The spdefem Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spdefem {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a structural invariant (bad index,
/// degenerate triangle, duplicate node, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition (k <= 0, n == 0, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the mesh, or a function produced a non-finite value.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Cholesky hit a pivot <= 0. The pivot is reported in the original
/// (unpermuted) row numbering.
class NotPositiveDefiniteError : public Error {
 public:
  NotPositiveDefiniteError(std::size_t pivot, double value)
      : Error("matrix is not positive definite: pivot " + std::to_string(pivot) +
              " is " + std::to_string(value)),
        pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

}  // namespace spdefem
