// Copyright 2026 The notesynth Authors.
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

#ifndef NOTESYNTH_COMMON_H_
#define NOTESYNTH_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace notesynth {

using TokenId = std::int32_t;

inline constexpr char kToolVersion[] = "notesynth 0.1.0";

// Invalid configuration or violated precondition supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pipeline stage failed; `what()` names the stage and cell/fold.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& detail)
      : std::runtime_error(stage + ": " + detail), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace notesynth

#endif  // NOTESYNTH_COMMON_H_
