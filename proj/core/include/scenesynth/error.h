// Copyright 2026 The scenesynth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCENESYNTH_ERROR_H_
#define SCENESYNTH_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace scenesynth {

enum class ErrorKind {
  kParse,       // malformed input file
  kValidation,  // well-formed input violating an invariant
  kNotFound,    // missing file or unknown key
  kBudget,      // generation budget exhausted
  kIo,          // read/write failure
  kUsage,       // bad arguments
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace scenesynth

#endif  // SCENESYNTH_ERROR_H_
