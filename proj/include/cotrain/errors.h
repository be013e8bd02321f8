// Copyright 2026 The Cotrain Authors.
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

#ifndef COTRAIN_ERRORS_H_
#define COTRAIN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace cotrain {

// Malformed configuration or invalid option values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed input data, or data that filters down to nothing.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A line-level parse failure in an interaction log.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A non-finite score or loss. Carries a diagnostic dump in what().
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cotrain

#endif  // COTRAIN_ERRORS_H_
