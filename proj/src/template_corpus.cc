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

#include "notesynth/template_corpus.h"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "notesynth/common.h"
#include "notesynth/rng.h"

namespace notesynth {
namespace {

using Words = std::vector<std::string>;

// Members of a concept are interchangeable; each concept has its own contexts.
struct Concept {
  Words members;
  std::string before;
  std::string after;
};

const std::vector<Concept>& symptom_concepts() {
  static const std::vector<Concept> concepts = {
      {{"pain", "discomfort", "ache"}, "Complained of", "in the"},
      {{"fever", "pyrexia", "hyperthermia"}, "Noted", "with chills"},
      {{"dyspnea", "breathlessness", "tachypnea"}, "Reported", "on exertion"},
      {{"nausea", "queasiness", "emesis"}, "Had", "after meals"},
      {{"confusion", "disorientation", "delirium"}, "Family noticed",
       "and memory lapses"},
      {{"weakness", "fatigue", "lethargy"}, "Described generalized",
       "limiting daily activities"},
  };
  return concepts;
}

struct Condition {
  std::string name;
  Words drugs;
};

const std::vector<Condition>& conditions() {
  static const std::vector<Condition> list = {
      {"diabetes", {"metformin", "insulin"}},
      {"hypertension", {"lisinopril", "amlodipine"}},
      {"asthma", {"albuterol", "montelukast"}},
      {"hyperlipidemia", {"atorvastatin", "simvastatin"}},
      {"COPD", {"tiotropium", "prednisone"}},
      {"GERD", {"omeprazole", "pantoprazole"}},
      {"CHF", {"furosemide", "carvedilol"}},
      {"depression", {"sertraline", "citalopram"}},
  };
  return list;
}

const Words kSurnames = {"McAllister", "DeVries", "O'Brien", "MacLeod",
                         "Johnson",    "Nguyen",  "Garcia",  "LeBlanc"};
const Words kTitles = {"Mr", "Ms", "Mrs"};
const Words kHospitals = {"Mercy General", "St Luke Hospital",
                          "Boston Medical Center"};
const Words kUnits = {"ICU", "CCU", "medical ward"};
const Words kStudies = {"CT", "MRI", "ECG", "echocardiogram"};
const Words kServices = {"Cardiology", "Neurology", "Pulmonology",
                         "Endocrinology"};
const Words kSites = {"chest", "abdomen", "back"};
const Words kFrequencies = {"daily", "twice daily", "at bedtime"};
const Words kDoses = {"5", "10", "20", "40", "500"};

std::string capitalized(std::string word) {
  word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
  return word;
}

class Writer {
 public:
  explicit Writer(Rng& rng) : rng_(rng) {}

  const std::string& pick(const Words& words) {
    return words[rng_.below(words.size())];
  }
  int between(int lo, int hi) {
    return lo + static_cast<int>(rng_.below(static_cast<std::uint64_t>(hi - lo + 1)));
  }
  bool coin(double p) { return rng_.bernoulli(p); }

  void line(const std::string& text) { out_ << text << '\n'; }
  std::string take() { return out_.str(); }

 private:
  Rng& rng_;
  std::ostringstream out_;
};

void write_note(Writer& w) {
  const std::string surname = w.pick(kSurnames);
  const std::string title = w.pick(kTitles);
  const bool male = title == "Mr";
  const std::string patient = title + " " + surname;

  w.line(std::string(kTemplateSections[0]) + ":");
  w.line(patient + " is a " + std::to_string(w.between(25, 90)) +
         " year old " + (male ? "man" : "woman") + " admitted to " +
         w.pick(kHospitals) + " via the " + (w.coin(0.7) ? "ED" : "clinic") +
         ".");
  const auto& symptoms = symptom_concepts();
  const std::size_t first = w.between(0, static_cast<int>(symptoms.size()) - 1);
  const std::size_t second =
      (first + 1 + w.between(0, static_cast<int>(symptoms.size()) - 2)) %
      symptoms.size();
  for (std::size_t c : {first, second}) {
    const Concept& s = symptoms[c];
    std::string tail = s.after;
    if (c == 0) tail += " " + w.pick(kSites);
    tail += " for " + std::to_string(w.between(2, 9)) + " days.";
    if (w.coin(0.3)) {
      w.line(capitalized(w.pick(s.members)) + " " + tail);
    } else if (w.coin(0.3)) {
      // Soft wrap that the normalizer merges back.
      w.line(s.before + " " + w.pick(s.members));
      w.line(tail);
    } else {
      w.line(s.before + " " + w.pick(s.members) + " " + tail);
    }
  }

  w.line(std::string(kTemplateSections[1]) + ":");
  const auto& conds = conditions();
  const std::size_t a = w.between(0, static_cast<int>(conds.size()) - 1);
  const std::size_t b =
      (a + 1 + w.between(0, static_cast<int>(conds.size()) - 2)) % conds.size();
  std::vector<std::string> drugs;
  for (std::size_t c : {a, b}) {
    const std::string drug = w.pick(conds[c].drugs);
    drugs.push_back(drug);
    const int form = w.between(0, 2);
    if (form == 0) {
      w.line("Past history of " + conds[c].name + " managed with " + drug + ".");
    } else if (form == 1) {
      w.line(capitalized(conds[c].name) + " managed with " + drug + ".");
    } else {
      w.line("Known " + conds[c].name + " on " + drug + " since " +
             std::to_string(w.between(1995, 2015)) + ".");
    }
  }
  const std::size_t denied = (first + 2) % symptoms.size();
  w.line("Patient denies " + w.pick(symptoms[denied].members) + ".");

  w.line(std::string(kTemplateSections[2]) + ":");
  const std::string study = w.pick(kStudies);
  w.line((male ? "He" : "She") + std::string(" was admitted to the ") +
         w.pick(kUnits) + " and underwent " + study + ".");
  w.line("Seen by Dr " + w.pick(kSurnames) + " from " + w.pick(kServices) + ".");
  w.line(capitalized(study) + " showed no acute findings.");

  w.line(std::string(kTemplateSections[3]) + ":");
  if (w.coin(0.5)) {
    drugs.push_back(w.pick(conds[w.between(0, static_cast<int>(conds.size()) - 1)].drugs));
  }
  for (std::size_t i = 0; i < drugs.size(); ++i) {
    w.line(std::to_string(i + 1) + ") " + drugs[i] + " " + w.pick(kDoses) +
           " mg " + w.pick(kFrequencies) + ".");
  }

  w.line(std::string(kTemplateSections[4]) + ":");
  w.line(std::string("Discharged ") + (w.coin(0.7) ? "home" : "to rehab") +
         " in " + (w.coin(0.5) ? "stable" : "good") + " condition.");
  w.line(capitalized(drugs.front()) + " was continued at discharge.");
  w.line("Follow up with Dr " + surname + " at " + w.pick(kHospitals) + " in " +
         std::to_string(w.between(1, 6)) + " weeks.");
}

SimilarityBenchmark similarity_benchmark(Rng& rng) {
  SimilarityBenchmark bench{"template-similarity", {}};
  const auto& concepts = symptom_concepts();
  std::vector<std::pair<std::string, std::string>> unrelated;
  for (std::size_t c = 0; c < concepts.size(); ++c) {
    const Words& m = concepts[c].members;
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = i + 1; j < m.size(); ++j) {
        bench.pairs.push_back({m[i], m[j], 4.0});
      }
    }
    for (std::size_t d = c + 1; d < concepts.size(); ++d) {
      for (const auto& x : m) {
        for (const auto& y : concepts[d].members) unrelated.emplace_back(x, y);
      }
    }
  }
  const std::size_t synonyms = bench.pairs.size();
  shuffle(unrelated, rng);
  for (std::size_t i = 0; i < synonyms && i < unrelated.size(); ++i) {
    bench.pairs.push_back({unrelated[i].first, unrelated[i].second, 1.0});
  }
  return bench;
}

SimilarityBenchmark relatedness_benchmark() {
  SimilarityBenchmark bench{"template-relatedness", {}};
  const auto& conds = conditions();
  for (const auto& c : conds) {
    for (const auto& d : c.drugs) bench.pairs.push_back({d, c.name, 4.0});
  }
  for (std::size_t i = 0; i < conds.size(); ++i) {
    const auto& other = conds[(i + conds.size() / 2) % conds.size()];
    for (const auto& d : conds[i].drugs) {
      bench.pairs.push_back({d, other.name, 1.0});
    }
  }
  return bench;
}

std::vector<NliExample> nli_examples(Rng& rng, std::size_t count) {
  const auto& concepts = symptom_concepts();
  std::vector<NliExample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t c = rng.below(concepts.size());
    const Words& m = concepts[c].members;
    const std::size_t a = rng.below(m.size());
    const std::size_t b = (a + 1 + rng.below(m.size() - 1)) % m.size();
    NliExample ex;
    ex.premise = {"Patient", "reports", m[a], "."};
    switch (i % 3) {
      case 0:
        ex.hypothesis = {"Patient", "has", m[b], "."};
        ex.label = NliLabel::kEntailment;
        break;
      case 1:
        ex.hypothesis = {"Patient", "denies", m[b], "."};
        ex.label = NliLabel::kContradiction;
        break;
      default: {
        const std::size_t d = (c + 1 + rng.below(concepts.size() - 1)) %
                              concepts.size();
        const Words& o = concepts[d].members;
        ex.hypothesis = {"Patient", "has", o[rng.below(o.size())], "."};
        ex.label = NliLabel::kNeutral;
      }
    }
    out.push_back(std::move(ex));
  }
  shuffle(out, rng);
  return out;
}

}  // namespace

TemplateCorpus make_template_corpus(std::uint64_t seed, std::size_t note_count) {
  if (note_count == 0) throw ConfigError("template: note_count must be >= 1");
  TemplateCorpus out;

  Rng note_rng(derive_seed(seed, "template-notes"));
  Writer writer(note_rng);
  for (std::size_t n = 0; n < note_count; ++n) {
    if (n) writer.line("");
    write_note(writer);
  }
  out.raw = writer.take();

  Rng bench_rng(derive_seed(seed, "template-benchmarks"));
  out.similarity = similarity_benchmark(bench_rng);
  out.relatedness = relatedness_benchmark();
  Rng nli_rng(derive_seed(seed, "template-nli"));
  out.nli_train = nli_examples(nli_rng, 300);
  out.nli_test = nli_examples(nli_rng, 150);
  return out;
}

TemplatePaths template_paths(const std::string& dir) {
  const std::filesystem::path d(dir);
  return {(d / "notes.txt").string(), (d / "similarity.csv").string(),
          (d / "relatedness.csv").string(), (d / "nli_train.jsonl").string(),
          (d / "nli_test.jsonl").string()};
}

TemplatePaths write_template_corpus(const TemplateCorpus& corpus,
                                    const std::string& dir) {
  std::filesystem::create_directories(dir);
  const TemplatePaths paths = template_paths(dir);
  {
    std::ofstream out(paths.raw, std::ios::binary);
    if (!out) throw FormatError("cannot write " + paths.raw);
    out << corpus.raw;
  }
  for (const auto& [path, bench] :
       {std::pair{paths.similarity, &corpus.similarity},
        std::pair{paths.relatedness, &corpus.relatedness}}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    write_benchmark(out, *bench);
  }
  write_nli_file(paths.nli_train, corpus.nli_train);
  write_nli_file(paths.nli_test, corpus.nli_test);
  return paths;
}

}  // namespace notesynth
