// Copyright 2026 The c2v Authors.
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

#ifndef C2V_ERROR_H_
#define C2V_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace c2v {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data (confusion networks, lexicons, task files, models).
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  // 1-based line number of the offending input, or 0 when not line-oriented.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// A word needed by the operation is not present in the lexicon/vocabulary.
class MissingWordError : public Error {
 public:
  explicit MissingWordError(const std::string& word)
      : Error("word not found: '" + word + "'"), word_(word) {}

  const std::string& word() const { return word_; }

 private:
  std::string word_;
};

// Binary model written by an unknown format revision.
class UnsupportedVersionError : public FormatError {
 public:
  explicit UnsupportedVersionError(unsigned version)
      : FormatError("unsupported model format version " +
                    std::to_string(version)),
        version_(version) {}

  unsigned version() const { return version_; }

 private:
  unsigned version_;
};

}  // namespace c2v

#endif  // C2V_ERROR_H_
