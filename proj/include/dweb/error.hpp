/*
 * Copyright (c) 2026 The dweb Authors.
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

namespace dweb {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (workload, CSV, parameter file).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A random draw was requested over an empty domain.
class EmptyDomainError : public Error {
 public:
  using Error::Error;
};

/// Generation refused before starting (e.g. fact table Cartesian product too large).
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Requested SQL construct or type has no rendering in the dialect.
class UnsupportedDialectError : public Error {
 public:
  using Error::Error;
};

/// Backend unreachable, rejected a statement, or failed mid-operation.
class BackendError : public Error {
 public:
  using Error::Error;
};

class ConnectionError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// A statement failed; carries its position in the submitted list when known.
class StatementError : public BackendError {
 public:
  StatementError(const std::string& what, std::size_t index)
      : BackendError(what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Refresh could not find a free composite key for a fact insertion.
class SaturationError : public Error {
 public:
  using Error::Error;
};

/// An operation's precondition on warehouse state does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A refresh target key vanished between selection and update.
class StaleKeyError : public Error {
 public:
  using Error::Error;
};

}  // namespace dweb
