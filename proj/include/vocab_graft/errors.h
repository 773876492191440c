// Copyright 2026 The vocab-graft Authors
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

#ifndef VOCAB_GRAFT_ERRORS_H_
#define VOCAB_GRAFT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace vocab_graft {

// Base class of every error raised by the library. The CLI maps these to
// exit code 2 ("data error").
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input parsed but violated its format or a model invariant. The message
// carries the location (line, record index or byte offset).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A caller-supplied value is out of its documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace vocab_graft

#endif  // VOCAB_GRAFT_ERRORS_H_
