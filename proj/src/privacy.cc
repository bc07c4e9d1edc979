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

#include "notesynth/privacy.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "notesynth/parallel.h"
#include "notesynth/rng.h"

namespace notesynth {

std::string_view to_string(DifferenceSign sign) {
  switch (sign) {
    case DifferenceSign::kPositive:
      return "positive";
    case DifferenceSign::kNegative:
      return "negative";
    case DifferenceSign::kTie:
      return "tie";
  }
  return "tie";
}

namespace {

DifferenceSign parse_sign(std::string_view s) {
  if (s == "positive") return DifferenceSign::kPositive;
  if (s == "negative") return DifferenceSign::kNegative;
  if (s == "tie") return DifferenceSign::kTie;
  throw FormatError("unknown sign: " + std::string(s));
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::optional<double> positive_fraction(
    const std::vector<NotePrivacyRecord>& records) {
  std::size_t pos = 0, neg = 0;
  for (const auto& r : records) {
    if (r.sign == DifferenceSign::kPositive) ++pos;
    if (r.sign == DifferenceSign::kNegative) ++neg;
  }
  if (pos + neg == 0) return std::nullopt;
  return static_cast<double>(pos) / static_cast<double>(pos + neg);
}

}  // namespace

NotePrivacyRecord s_pdtp_note(const LanguageModel& full,
                              const LanguageModel& loo, const Note& note,
                              std::size_t context_window) {
  if (full.vocabulary().tokens() != loo.vocabulary().tokens()) {
    throw ConfigError("s_pdtp: models must share one vocabulary");
  }
  const auto ids = full.vocabulary().encode(note);
  if (ids.empty()) throw ConfigError("s_pdtp: empty note");

  const auto lp_full = full.score_note(ids);
  const auto lp_loo = loo.score_note(ids);

  NotePrivacyRecord record;
  record.note_id = note.id;
  record.s_pdtp = -1.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const double diff = std::abs(lp_full[i] - lp_loo[i]);
    if (diff > record.s_pdtp) {
      record.s_pdtp = diff;
      record.position = i;
    }
  }
  const std::size_t j = record.position;
  record.log_prob_full = lp_full[j];
  record.log_prob_loo = lp_loo[j];
  record.sign = lp_full[j] > lp_loo[j]   ? DifferenceSign::kPositive
                : lp_full[j] < lp_loo[j] ? DifferenceSign::kNegative
                                         : DifferenceSign::kTie;
  const auto tokens = note.tokens();
  record.token = full.vocabulary().token(ids[j]);
  record.context_start = j >= context_window ? j - context_window : 0;
  const std::size_t end = std::min(tokens.size(), j + context_window + 1);
  record.context.assign(tokens.begin() + record.context_start,
                        tokens.begin() + end);
  return record;
}

std::vector<std::size_t> privacy_sample(std::size_t corpus_notes,
                                        std::size_t sample_size,
                                        std::uint64_t seed) {
  if (sample_size < 1 || sample_size > corpus_notes) {
    throw ConfigError("privacy: sample size must be in [1, |T|]");
  }
  std::vector<std::size_t> order(corpus_notes);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "privacy-sample"));
  shuffle(order, rng);
  order.resize(sample_size);
  std::sort(order.begin(), order.end());
  return order;
}

PrivacyReport s_pdtp_score(const Corpus& train, const PrivacyConfig& config) {
  if (train.notes.size() < 2) {
    throw ConfigError("privacy: need at least two notes");
  }
  if (!config.trainer) throw ConfigError("privacy: no trainer");
  const auto sample =
      privacy_sample(train.notes.size(), config.sample_size, config.seed);

  ModelPtr full;
  try {
    full = config.trainer(train);
  } catch (const std::exception& e) {
    throw StageError("privacy", std::string("full model: ") + e.what());
  }

  PrivacyReport report;
  report.records.resize(sample.size());
  parallel_for(sample.size(), config.jobs, [&](std::size_t k) {
    const std::size_t held_out = sample[k];
    const Note& note = train.notes[held_out];
    try {
      Corpus rest;
      rest.role = train.role;
      rest.notes.reserve(train.notes.size() - 1);
      for (std::size_t i = 0; i < train.notes.size(); ++i) {
        if (i != held_out) rest.notes.push_back(train.notes[i]);
      }
      const ModelPtr loo = config.trainer(rest);
      report.records[k] = s_pdtp_note(*full, *loo, note, config.context_window);
    } catch (const std::exception& e) {
      throw StageError("privacy", "fold " + std::to_string(k) + " (note " +
                                      note.id + "): " + e.what());
    }
  });

  double sum = 0.0;
  for (const auto& r : report.records) sum += r.s_pdtp;
  report.aggregate = sum / static_cast<double>(report.records.size());
  report.sign_positive_fraction = positive_fraction(report.records);
  report.corpus_notes = train.notes.size();
  report.sample_size = config.sample_size;
  report.seed = config.seed;
  report.trainer_description = config.trainer_description;
  return report;
}

PrivacyAnalysis analyze_report(const PrivacyReport& report) {
  if (report.records.empty()) throw ConfigError("analysis: empty report");
  PrivacyAnalysis analysis;
  for (const auto& r : report.records) {
    switch (r.sign) {
      case DifferenceSign::kPositive:
        ++analysis.positive;
        break;
      case DifferenceSign::kNegative:
        ++analysis.negative;
        break;
      case DifferenceSign::kTie:
        ++analysis.ties;
        break;
    }
    analysis.ranked.push_back({r.note_id, r.s_pdtp, r.sign, r.token, r.context});
  }
  analysis.sign_positive_fraction = positive_fraction(report.records);
  std::stable_sort(analysis.ranked.begin(), analysis.ranked.end(),
                   [](const auto& a, const auto& b) { return a.s_pdtp > b.s_pdtp; });
  return analysis;
}

double pdtp_point(const std::map<std::string, double>& log_probs_full,
                  const std::map<std::string, double>& log_probs_loo) {
  if (log_probs_full.size() != log_probs_loo.size() ||
      !std::equal(log_probs_full.begin(), log_probs_full.end(),
                  log_probs_loo.begin(),
                  [](const auto& a, const auto& b) { return a.first == b.first; })) {
    throw ConfigError("pdtp: predictors have different outcome sets");
  }
  if (log_probs_full.empty()) throw ConfigError("pdtp: empty outcome set");
  double best = 0.0;
  auto it = log_probs_loo.begin();
  for (const auto& [outcome, lp] : log_probs_full) {
    best = std::max(best, std::abs(lp - it->second));
    ++it;
  }
  return best;
}

std::string privacy_report_to_json(const PrivacyReport& report) {
  using nlohmann::ordered_json;
  ordered_json config = {
      {"sample_size", report.sample_size},
      {"seed", report.seed},
      {"trainer", report.trainer_description},
  };
  ordered_json j;
  j["tool_version"] = kToolVersion;
  j["config_hash"] = hex64(fnv1a64(config.dump()));
  j["config"] = config;
  j["corpus_notes"] = report.corpus_notes;
  j["aggregate"] = report.aggregate;
  if (report.sign_positive_fraction) {
    j["sign_positive_fraction"] = *report.sign_positive_fraction;
  } else {
    j["sign_positive_fraction"] = nullptr;
  }
  j["records"] = ordered_json::array();
  for (const auto& r : report.records) {
    j["records"].push_back({
        {"note_id", r.note_id},
        {"s_pdtp", r.s_pdtp},
        {"position", r.position},
        {"sign", std::string(to_string(r.sign))},
        {"token", r.token},
        {"log_prob_full", r.log_prob_full},
        {"log_prob_loo", r.log_prob_loo},
        {"context_start", r.context_start},
        {"context", r.context},
    });
  }
  return j.dump(2) + "\n";
}

PrivacyReport privacy_report_from_json(const std::string& text) {
  PrivacyReport report;
  try {
    const auto j = nlohmann::json::parse(text);
    const auto& config = j.at("config");
    report.sample_size = config.at("sample_size").get<std::size_t>();
    report.seed = config.at("seed").get<std::uint64_t>();
    report.trainer_description = config.at("trainer").get<std::string>();
    report.corpus_notes = j.at("corpus_notes").get<std::size_t>();
    report.aggregate = j.at("aggregate").get<double>();
    if (!j.at("sign_positive_fraction").is_null()) {
      report.sign_positive_fraction = j["sign_positive_fraction"].get<double>();
    }
    for (const auto& r : j.at("records")) {
      NotePrivacyRecord rec;
      rec.note_id = r.at("note_id").get<std::string>();
      rec.s_pdtp = r.at("s_pdtp").get<double>();
      rec.position = r.at("position").get<std::size_t>();
      rec.sign = parse_sign(r.at("sign").get<std::string>());
      rec.token = r.at("token").get<std::string>();
      rec.log_prob_full = r.at("log_prob_full").get<double>();
      rec.log_prob_loo = r.at("log_prob_loo").get<double>();
      rec.context_start = r.at("context_start").get<std::size_t>();
      rec.context = r.at("context").get<std::vector<std::string>>();
      report.records.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("privacy report: ") + e.what());
  }
  return report;
}

std::string render_privacy_table(const PrivacyReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-14s %9s %6s %-9s %s\n", "note", "s-pdtp",
                "pos", "sign", "token [context]");
  out << line;
  for (const auto& r : report.records) {
    std::string context;
    for (std::size_t i = 0; i < r.context.size(); ++i) {
      if (i) context += ' ';
      context += r.context[i];
    }
    std::snprintf(line, sizeof(line), "%-14s %9.4f %6zu %-9s ", r.note_id.c_str(),
                  r.s_pdtp, r.position, std::string(to_string(r.sign)).c_str());
    out << line << r.token << " [" << context << "]\n";
  }
  std::snprintf(line, sizeof(line), "aggregate S-PDTP: %.6f over %zu of %zu notes\n",
                report.aggregate, report.records.size(), report.corpus_notes);
  out << line;
  if (report.sign_positive_fraction) {
    std::snprintf(line, sizeof(line), "sign-positive fraction: %.4f\n",
                  *report.sign_positive_fraction);
    out << line;
  }
  return out.str();
}

}  // namespace notesynth
