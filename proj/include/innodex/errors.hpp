// Copyright 2026 The innodex Authors
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

namespace innodex {

// Error taxonomy mirrors the CLI exit codes: config 2, data 3, source 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or missing configuration, including a cassette absent in replay mode.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Invalid input data, violated invariants, stale stage artifacts.
class DataError : public Error {
 public:
  using Error::Error;
};

// A live source kept failing after all retries.
class SourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace innodex
