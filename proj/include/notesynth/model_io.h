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

#ifndef NOTESYNTH_MODEL_IO_H_
#define NOTESYNTH_MODEL_IO_H_

#include <iosfwd>
#include <memory>
#include <string>

#include "notesynth/language_model.h"

namespace notesynth {

// Versioned binary container; see docs/file_formats.md for the layout.
inline constexpr char kModelMagic[4] = {'P', 'T', 'L', 'M'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

enum class ModelKind : std::uint32_t {
  kUniform = 1,
  kUnigram = 2,
  kBigram = 3,
  kLstm = 4,
};

void save_model(std::ostream& out, const LanguageModel& model);
void save_model_file(const std::string& path, const LanguageModel& model);
std::string model_to_bytes(const LanguageModel& model);

// LSTM weights are always loaded as 64-bit floats.
ModelPtr load_model(std::istream& in);
ModelPtr load_model_file(const std::string& path);

}  // namespace notesynth

#endif  // NOTESYNTH_MODEL_IO_H_
