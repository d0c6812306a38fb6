// Copyright 2026 The FERL Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ferl {

/// Raised when a caller violates a documented precondition (dimension
/// mismatch, out-of-range parameter, malformed encoding).
class ContractError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by the text readers (pool files, grid maps, checkpoints).
class ParseError : public std::runtime_error {
   public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

   private:
    std::size_t line_;
};

/// Raised for invalid experiment configuration; reported before any run starts.
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace ferl
