// Copyright 2026 The SwitchHit Authors
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

namespace switchhit {

/// Failure category. Values line up with the C API's sh_status codes.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kIo = 2,
  kParse = 3,
  kSchema = 4,
  kDataset = 5,
  kConfig = 6,
  kInternal = 7,
};

/// Stable lowercase name used as the CLI error prefix ("config_error" ...).
const char* error_category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace switchhit
