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

#include "notesynth/model_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "notesynth/count_models.h"
#include "notesynth/lstm_lm.h"

namespace notesynth {
namespace {

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u32(std::uint32_t v) { little_endian(v, 4); }
  void u64(std::uint64_t v) { little_endian(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::string_view s) {
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void string(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s);
  }

 private:
  void little_endian(std::uint64_t v, int width) {
    char buf[8];
    for (int i = 0; i < width; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out_.write(buf, width);
  }
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(little_endian(4)); }
  std::uint64_t u64() { return little_endian(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes(std::size_t n) {
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (!in_) throw FormatError("model file truncated");
    return s;
  }
  std::string string() { return bytes(u32()); }

 private:
  std::uint64_t little_endian(int width) {
    unsigned char buf[8];
    in_.read(reinterpret_cast<char*>(buf), width);
    if (!in_) throw FormatError("model file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= std::uint64_t{buf[i]} << (8 * i);
    return v;
  }
  std::istream& in_;
};

void write_vocabulary(Writer& w, const Vocabulary& vocab) {
  w.u64(vocab.min_count());
  w.u64(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    w.string(vocab.token(static_cast<TokenId>(i)));
    w.u64(vocab.count(static_cast<TokenId>(i)));
  }
}

Vocabulary read_vocabulary(Reader& r) {
  const std::uint64_t min_count = r.u64();
  const std::uint64_t size = r.u64();
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  for (std::uint64_t i = 0; i < size; ++i) {
    tokens.push_back(r.string());
    counts.push_back(r.u64());
  }
  return Vocabulary::from_tokens(std::move(tokens), std::move(counts),
                                 min_count);
}

template <typename Scalar>
void write_lstm(Writer& w, const LstmLanguageModel<Scalar>& model) {
  const auto& c = model.config();
  w.u32(static_cast<std::uint32_t>(c.layers));
  w.u32(static_cast<std::uint32_t>(c.hidden_size));
  w.f64(c.dropout);
  w.f64(c.initial_lr);
  w.u32(c.lr_policy == LrPolicy::kMedText2 ? 0 : 1);
  w.u32(static_cast<std::uint32_t>(c.epochs));
  w.f64(c.grad_clip);
  w.u32(static_cast<std::uint32_t>(c.bptt));
  w.u32(static_cast<std::uint32_t>(c.batch_size));
  w.u32(c.tied_embeddings ? 1 : 0);
  w.u64(c.seed);
  auto params = model.params();
  const auto tensors = params.tensors();
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    w.u32(2);
    w.u64(static_cast<std::uint64_t>(t->rows()));
    w.u64(static_cast<std::uint64_t>(t->cols()));
    for (nn::Index k = 0; k < t->size(); ++k) {
      w.f64(static_cast<double>(t->data()[k]));
    }
  }
}

ModelPtr read_lstm(Reader& r, Vocabulary vocab) {
  LstmLmConfig c;
  c.layers = static_cast<int>(r.u32());
  c.hidden_size = static_cast<int>(r.u32());
  c.dropout = r.f64();
  c.initial_lr = r.f64();
  c.lr_policy = r.u32() == 0 ? LrPolicy::kMedText2 : LrPolicy::kMedText103;
  c.epochs = static_cast<int>(r.u32());
  c.grad_clip = r.f64();
  c.bptt = static_cast<int>(r.u32());
  c.batch_size = static_cast<int>(r.u32());
  c.tied_embeddings = r.u32() != 0;
  c.seed = r.u64();
  c.validate();
  auto params = nn::LstmLmParams<double>::zeros(
      static_cast<nn::Index>(vocab.size()), c.hidden_size, c.layers);
  const auto tensors = params.tensors();
  if (r.u32() != tensors.size()) throw FormatError("lstm tensor count mismatch");
  for (const auto& [name, t] : tensors) {
    if (r.u32() != 2) throw FormatError("lstm tensor rank mismatch: " + name);
    const auto rows = r.u64();
    const auto cols = r.u64();
    if (rows != static_cast<std::uint64_t>(t->rows()) ||
        cols != static_cast<std::uint64_t>(t->cols())) {
      throw FormatError("lstm tensor shape mismatch: " + name);
    }
    for (nn::Index k = 0; k < t->size(); ++k) t->data()[k] = r.f64();
  }
  return std::make_shared<LstmModel>(std::move(vocab), c, std::move(params));
}

}  // namespace

void save_model(std::ostream& out, const LanguageModel& model) {
  Writer w(out);
  w.bytes(std::string_view(kModelMagic, 4));
  w.u32(kModelFormatVersion);
  if (dynamic_cast<const UniformModel*>(&model)) {
    w.u32(static_cast<std::uint32_t>(ModelKind::kUniform));
    write_vocabulary(w, model.vocabulary());
  } else if (auto* uni = dynamic_cast<const UnigramModel*>(&model)) {
    w.u32(static_cast<std::uint32_t>(ModelKind::kUnigram));
    write_vocabulary(w, model.vocabulary());
    for (auto c : uni->counts()) w.u64(c);
  } else if (auto* bi = dynamic_cast<const BigramModel*>(&model)) {
    w.u32(static_cast<std::uint32_t>(ModelKind::kBigram));
    write_vocabulary(w, model.vocabulary());
    w.u64(bi->pair_counts().size());
    for (const auto& [key, count] : bi->pair_counts()) {
      w.u64(static_cast<std::uint64_t>(key.first));
      w.u64(static_cast<std::uint64_t>(key.second));
      w.u64(count);
    }
  } else if (auto* lstm = dynamic_cast<const LstmLanguageModel<double>*>(&model)) {
    w.u32(static_cast<std::uint32_t>(ModelKind::kLstm));
    write_vocabulary(w, model.vocabulary());
    write_lstm(w, *lstm);
  } else if (auto* lstm32 = dynamic_cast<const LstmLanguageModel<float>*>(&model)) {
    w.u32(static_cast<std::uint32_t>(ModelKind::kLstm));
    write_vocabulary(w, model.vocabulary());
    write_lstm(w, *lstm32);
  } else {
    throw ConfigError("cannot serialize model kind: " + model.kind());
  }
  if (!out) throw FormatError("failed to write model");
}

void save_model_file(const std::string& path, const LanguageModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write model: " + path);
  save_model(out, model);
}

std::string model_to_bytes(const LanguageModel& model) {
  std::ostringstream out(std::ios::binary);
  save_model(out, model);
  return out.str();
}

ModelPtr load_model(std::istream& in) {
  Reader r(in);
  if (r.bytes(4) != std::string_view(kModelMagic, 4)) {
    throw FormatError("not a PTLM model file");
  }
  if (const auto version = r.u32(); version != kModelFormatVersion) {
    throw FormatError("unsupported model format version " +
                      std::to_string(version));
  }
  const auto kind = static_cast<ModelKind>(r.u32());
  auto vocab = read_vocabulary(r);
  switch (kind) {
    case ModelKind::kUniform:
      return std::make_shared<UniformModel>(std::move(vocab));
    case ModelKind::kUnigram: {
      std::vector<std::uint64_t> counts(vocab.size());
      for (auto& c : counts) c = r.u64();
      return std::make_shared<UnigramModel>(std::move(vocab), std::move(counts));
    }
    case ModelKind::kBigram: {
      BigramModel::PairCounts pairs;
      const auto n = r.u64();
      for (std::uint64_t i = 0; i < n; ++i) {
        const auto prev = static_cast<TokenId>(r.u64());
        const auto next = static_cast<TokenId>(r.u64());
        pairs[{prev, next}] = r.u64();
      }
      return std::make_shared<BigramModel>(std::move(vocab), std::move(pairs));
    }
    case ModelKind::kLstm:
      return read_lstm(r, std::move(vocab));
  }
  throw FormatError("unknown model kind tag");
}

ModelPtr load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model: " + path);
  return load_model(in);
}

}  // namespace notesynth
