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

#ifndef NOTESYNTH_PRIVACY_H_
#define NOTESYNTH_PRIVACY_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "notesynth/language_model.h"

namespace notesynth {

enum class DifferenceSign { kPositive, kNegative, kTie };

std::string_view to_string(DifferenceSign sign);

// Leave-one-out comparison for one note at the position of the largest
// absolute log-probability difference.
struct NotePrivacyRecord {
  std::string note_id;
  double s_pdtp = 0.0;
  std::size_t position = 0;
  // kPositive when the model trained with the note assigns the higher
  // log-probability at `position`.
  DifferenceSign sign = DifferenceSign::kTie;
  std::string token;
  std::vector<std::string> context;  // tokens around `position`
  std::size_t context_start = 0;     // note index of context.front()
  double log_prob_full = 0.0;
  double log_prob_loo = 0.0;
};

struct PrivacyConfig {
  std::size_t sample_size = 30;
  std::uint64_t seed = 1;
  LmTrainer trainer;
  std::string trainer_description;
  std::size_t jobs = 1;
  std::size_t context_window = 5;
};

struct PrivacyReport {
  std::vector<NotePrivacyRecord> records;  // in corpus order
  double aggregate = 0.0;                  // mean of record s_pdtp
  std::optional<double> sign_positive_fraction;
  std::size_t corpus_notes = 0;
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
  std::string trainer_description;
};

// max_i |log p_full(w_i | w_<i) - log p_loo(w_i | w_<i)| over the note, with
// the context restricted to the note itself. Ties in the argmax go to the
// earliest position. Both models must share one vocabulary.
NotePrivacyRecord s_pdtp_note(const LanguageModel& full,
                              const LanguageModel& loo, const Note& note,
                              std::size_t context_window = 5);

// Trains M(T) once and M(T \ {c}) for K notes drawn uniformly without
// replacement; the aggregate is the sample mean of the per-note scores.
// Folds run on up to config.jobs threads; the report does not depend on it.
PrivacyReport s_pdtp_score(const Corpus& train, const PrivacyConfig& config);

// The indices s_pdtp_score samples, ascending.
std::vector<std::size_t> privacy_sample(std::size_t corpus_notes,
                                        std::size_t sample_size,
                                        std::uint64_t seed);

struct RankedRecord {
  std::string note_id;
  double s_pdtp = 0.0;
  DifferenceSign sign = DifferenceSign::kTie;
  std::string token;
  std::vector<std::string> context;
};

struct PrivacyAnalysis {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t ties = 0;
  // positive / (positive + negative); empty when every record is a tie.
  std::optional<double> sign_positive_fraction;
  std::vector<RankedRecord> ranked;  // by s_pdtp, descending
};

PrivacyAnalysis analyze_report(const PrivacyReport& report);

// Pointwise form for predictors over an enumerable outcome set:
// max over outcomes y of |log p_full(y) - log p_loo(y)|.
double pdtp_point(const std::map<std::string, double>& log_probs_full,
                  const std::map<std::string, double>& log_probs_loo);

template <typename Record>
using OutcomePredictor =
    std::function<std::map<std::string, double>(const Record&)>;

template <typename Record>
double pdtp_point(const OutcomePredictor<Record>& full,
                  const OutcomePredictor<Record>& loo, const Record& record) {
  return pdtp_point(full(record), loo(record));
}

// Structured report: every record field, the aggregate, the config echo, the
// tool version and a hash of the config.
std::string privacy_report_to_json(const PrivacyReport& report);
PrivacyReport privacy_report_from_json(const std::string& text);
std::string render_privacy_table(const PrivacyReport& report);

}  // namespace notesynth

#endif  // NOTESYNTH_PRIVACY_H_
