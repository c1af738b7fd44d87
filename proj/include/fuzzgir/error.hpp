// Copyright 2026 The fuzzgir Authors.
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

namespace fuzzgir {

// Base of every error raised by the library. The CLI maps any Error that
// escapes a subcommand to the data/integrity exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IdentifierError : public Error {
 public:
  using Error::Error;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

// Malformed input files (gazetteer rows, corpus lines, config files).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Broken cross references, cycles, counts that disagree with each other.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Statistics that cannot come from one corpus (n > N, sf > 0 with n == 0).
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class UnknownIdError : public Error {
 public:
  using Error::Error;
};

class MissingInputError : public Error {
 public:
  using Error::Error;
};

class NoLocationError : public Error {
 public:
  using Error::Error;
};

class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace fuzzgir
