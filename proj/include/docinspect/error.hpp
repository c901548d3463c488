// Copyright 2026 The docinspect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace docinspect {

enum class ErrorKind { Validation, Io, Client };

// Base for every error the toolkit raises. The kind selects the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

// A rule-based injector whose precondition does not hold for the given input.
class PreconditionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

enum class ClientErrorKind { AuthMissing, Http, Timeout, Transport, Malformed, ReplayMiss };

class ClientError : public Error {
 public:
  ClientError(ClientErrorKind kind, const std::string& what, int status = 0)
      : Error(ErrorKind::Client, what), client_kind_(kind), status_(status) {}
  ClientErrorKind client_kind() const noexcept { return client_kind_; }
  int status() const noexcept { return status_; }

 private:
  ClientErrorKind client_kind_;
  int status_;
};

}  // namespace docinspect
